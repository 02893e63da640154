#include "csgnash/bimatrix.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "csgnash/error.hpp"

namespace csgnash {

BimatrixGame BimatrixGame::from_rows(const std::vector<std::vector<Rational>>& a,
                                     const std::vector<std::vector<Rational>>& b) {
    if (a.empty() || a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "payoff matrices differ in row count");
    BimatrixGame g(a.size(), a.front().size());
    if (g.cols == 0) fail(ErrorCode::DimensionMismatch, "payoff matrix has no columns");
    for (std::size_t i = 0; i < g.rows; ++i) {
        if (a[i].size() != g.cols || b[i].size() != g.cols)
            fail(ErrorCode::DimensionMismatch, "ragged payoff matrix");
        for (std::size_t j = 0; j < g.cols; ++j) {
            g.payoff1(i, j) = a[i][j];
            g.payoff2(i, j) = b[i][j];
        }
    }
    return g;
}

namespace {

// Solves the square system in place; nullopt if singular.
std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>>& a, std::vector<Rational>& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            std::swap(b[pivot], b[col]);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

// Vertex of {(w, t) : w >= 0, sum w = 1, P w <= t 1} with its tight rows.
struct Vertex {
    std::vector<Rational> w;
    Rational t;
    std::vector<bool> tight;
};

// P is k x n (row-major). Enumerates vertices by choosing the support S of w
// and |S| tight rows; degenerate vertices found several times are merged.
std::vector<Vertex> polytope_vertices(const std::vector<Rational>& p, std::size_t k, std::size_t n) {
    std::map<std::vector<Rational>, Vertex> found;
    std::vector<std::size_t> supp, rows;
    for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
        supp.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (mask & (1ul << j)) supp.push_back(j);
        const std::size_t s = supp.size();
        if (s > k) continue;
        // Iterate s-subsets of rows.
        rows.resize(s);
        for (std::size_t i = 0; i < s; ++i) rows[i] = i;
        while (true) {
            std::vector<std::vector<Rational>> a(s + 1, std::vector<Rational>(s + 1));
            std::vector<Rational> b(s + 1);
            for (std::size_t r = 0; r < s; ++r) {
                for (std::size_t c = 0; c < s; ++c) a[r][c] = p[rows[r] * n + supp[c]];
                a[r][s] = -1;
            }
            for (std::size_t c = 0; c < s; ++c) a[s][c] = 1;
            b[s] = 1;
            if (auto sol = solve_square(a, b)) {
                bool ok = true;
                for (std::size_t c = 0; c < s && ok; ++c) ok = (*sol)[c] > 0;
                if (ok) {
                    Vertex vtx;
                    vtx.w.assign(n, Rational(0));
                    for (std::size_t c = 0; c < s; ++c) vtx.w[supp[c]] = (*sol)[c];
                    vtx.t = (*sol)[s];
                    vtx.tight.assign(k, false);
                    for (std::size_t i = 0; i < k && ok; ++i) {
                        Rational val = 0;
                        for (std::size_t c : supp) val += p[i * n + c] * vtx.w[c];
                        if (val > vtx.t) ok = false;
                        else vtx.tight[i] = (val == vtx.t);
                    }
                    if (ok) found.try_emplace(vtx.w, std::move(vtx));
                }
            }
            // Next combination.
            std::size_t i = s;
            while (i > 0 && rows[i - 1] == k - s + i - 1) --i;
            if (i == 0) break;
            ++rows[i - 1];
            for (std::size_t j = i; j < s; ++j) rows[j] = rows[j - 1] + 1;
        }
    }
    std::vector<Vertex> out;
    out.reserve(found.size());
    for (auto& [key, vtx] : found) out.push_back(std::move(vtx));
    return out;
}

int compare_index_lists(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end())) return -1;
    if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) return 1;
    return 0;
}

int compare_values(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i] < b[i]) return -1;
        if (b[i] < a[i]) return 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

Rational scale_of(std::initializer_list<const Rational*> values) {
    Rational s = 1;
    for (auto* v : values) {
        Rational a = abs(*v);
        if (a > s) s = a;
    }
    return s;
}

bool geq_tol(const Rational& a, const Rational& b, const Rational& tol) {
    if (tol == 0) return a >= b;
    return a - b >= -tol * scale_of({&a, &b});
}

}  // namespace

std::vector<std::size_t> support_of(const std::vector<Rational>& dist) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < dist.size(); ++i)
        if (dist[i] != 0) s.push_back(i);
    return s;
}

bool lexicographic_less(const MixedProfile& a, const MixedProfile& b) {
    if (int c = compare_index_lists(support_of(a.x), support_of(b.x))) return c < 0;
    if (int c = compare_index_lists(support_of(a.y), support_of(b.y))) return c < 0;
    if (int c = compare_values(a.x, b.x)) return c < 0;
    return compare_values(a.y, b.y) < 0;
}

DominanceReduction eliminate_dominated(const BimatrixGame& g) {
    std::vector<std::size_t> rows(g.rows), cols(g.cols);
    for (std::size_t i = 0; i < g.rows; ++i) rows[i] = i;
    for (std::size_t j = 0; j < g.cols; ++j) cols[j] = j;

    auto row_dominated = [&](std::size_t r) {
        for (std::size_t d : rows) {
            if (d == r) continue;
            bool strict = true;
            for (std::size_t c : cols)
                if (!(g.payoff1(d, c) > g.payoff1(r, c))) { strict = false; break; }
            if (strict) return true;
        }
        return false;
    };
    auto col_dominated = [&](std::size_t c) {
        for (std::size_t d : cols) {
            if (d == c) continue;
            bool strict = true;
            for (std::size_t r : rows)
                if (!(g.payoff2(r, d) > g.payoff2(r, c))) { strict = false; break; }
            if (strict) return true;
        }
        return false;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t k = 0; k < rows.size() && rows.size() > 1; ++k) {
            if (row_dominated(rows[k])) {
                rows.erase(rows.begin() + static_cast<long>(k));
                changed = true;
                break;
            }
        }
        for (std::size_t k = 0; k < cols.size() && cols.size() > 1; ++k) {
            if (col_dominated(cols[k])) {
                cols.erase(cols.begin() + static_cast<long>(k));
                changed = true;
                break;
            }
        }
    }

    DominanceReduction out;
    out.reduced = BimatrixGame(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out.reduced.payoff1(i, j) = g.payoff1(rows[i], cols[j]);
            out.reduced.payoff2(i, j) = g.payoff2(rows[i], cols[j]);
        }
    out.row_map = std::move(rows);
    out.col_map = std::move(cols);
    return out;
}

std::vector<MixedProfile> enumerate_equilibria(const BimatrixGame& g) {
    if (g.rows == 0 || g.cols == 0) fail(ErrorCode::DimensionMismatch, "empty game");
    if (g.rows > 24 || g.cols > 24) fail(ErrorCode::Unsupported, "game too large for exact enumeration");
    const std::size_t l = g.rows, m = g.cols;

    // Player 2's mixed strategy y against player 1's rows: P = Z1 (l x m).
    std::vector<Vertex> yv = polytope_vertices(g.z1, l, m);
    // Player 1's mixed strategy x against player 2's columns: P = Z2^T (m x l).
    std::vector<Rational> z2t(m * l);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < m; ++j) z2t[j * l + i] = g.payoff2(i, j);
    std::vector<Vertex> xv = polytope_vertices(z2t, m, l);

    std::vector<MixedProfile> out;
    for (const auto& xs : xv) {
        for (const auto& ys : yv) {
            bool labelled = true;
            for (std::size_t i = 0; i < l && labelled; ++i)
                if (xs.w[i] != 0 && !ys.tight[i]) labelled = false;
            for (std::size_t j = 0; j < m && labelled; ++j)
                if (ys.w[j] != 0 && !xs.tight[j]) labelled = false;
            if (labelled) out.push_back(MixedProfile{xs.w, ys.w, ys.t, xs.t});
        }
    }
    if (out.empty()) fail(ErrorCode::Internal, "no equilibrium found");
    std::sort(out.begin(), out.end(), lexicographic_less);
    return out;
}

bool is_equilibrium(const BimatrixGame& g, const std::vector<Rational>& x, const std::vector<Rational>& y,
                    const Rational& u, const Rational& v, const Rational& tolerance) {
    if (x.size() != g.rows || y.size() != g.cols)
        fail(ErrorCode::DimensionMismatch, "strategy length does not match the game");
    Rational sx = 0, sy = 0;
    for (const auto& p : x) {
        if (p < 0) return false;
        sx += p;
    }
    for (const auto& p : y) {
        if (p < 0) return false;
        sy += p;
    }
    if (!approx_equal(sx, 1, tolerance) || !approx_equal(sy, 1, tolerance)) return false;

    Rational comp1 = 0, comp2 = 0;
    for (std::size_t i = 0; i < g.rows; ++i) {
        Rational zy = 0;
        for (std::size_t j = 0; j < g.cols; ++j) zy += g.payoff1(i, j) * y[j];
        if (!geq_tol(u, zy, tolerance)) return false;
        comp1 += x[i] * (u - zy);
    }
    for (std::size_t j = 0; j < g.cols; ++j) {
        Rational zx = 0;
        for (std::size_t i = 0; i < g.rows; ++i) zx += g.payoff2(i, j) * x[i];
        if (!geq_tol(v, zx, tolerance)) return false;
        comp2 += y[j] * (v - zx);
    }
    return approx_equal(comp1, 0, tolerance) && approx_equal(comp2, 0, tolerance);
}

std::size_t select_swne(std::span<const MixedProfile> eqs, const Rational& tol) {
    if (eqs.empty()) fail(ErrorCode::EmptyList, "no equilibria to select from");
    Rational best_sum = eqs[0].u + eqs[0].v;
    for (const auto& e : eqs) {
        Rational s = e.u + e.v;
        if (s > best_sum) best_sum = s;
    }
    std::vector<std::size_t> cand;
    for (std::size_t k = 0; k < eqs.size(); ++k)
        if (approx_equal(eqs[k].u + eqs[k].v, best_sum, tol)) cand.push_back(k);

    auto lex_min = [&](const std::vector<std::size_t>& ks) {
        std::size_t best = ks.front();
        for (std::size_t k : ks)
            if (lexicographic_less(eqs[k], eqs[best])) best = k;
        return best;
    };

    std::vector<std::size_t> equal_payoff;
    for (std::size_t k : cand)
        if (approx_equal(eqs[k].u, eqs[k].v, tol)) equal_payoff.push_back(k);
    if (!equal_payoff.empty()) return lex_min(equal_payoff);

    Rational best_u = eqs[cand.front()].u;
    for (std::size_t k : cand)
        if (eqs[k].u > best_u) best_u = eqs[k].u;
    std::vector<std::size_t> top;
    for (std::size_t k : cand)
        if (approx_equal(eqs[k].u, best_u, tol)) top.push_back(k);
    return lex_min(top);
}

SwneSolution solve_swne(const BimatrixGame& g, const SwneOptions& options) {
    SwneSolution out;
    if (!options.eliminate_dominated) {
        auto eqs = enumerate_equilibria(g);
        out.equilibrium_count = eqs.size();
        out.profile = eqs[select_swne(eqs, options.tolerance)];
        return out;
    }
    DominanceReduction red = eliminate_dominated(g);
    auto eqs = enumerate_equilibria(red.reduced);
    out.equilibrium_count = eqs.size();
    const MixedProfile& chosen = eqs[select_swne(eqs, options.tolerance)];
    out.profile.x.assign(g.rows, Rational(0));
    out.profile.y.assign(g.cols, Rational(0));
    for (std::size_t i = 0; i < red.row_map.size(); ++i) out.profile.x[red.row_map[i]] = chosen.x[i];
    for (std::size_t j = 0; j < red.col_map.size(); ++j) out.profile.y[red.col_map[j]] = chosen.y[j];
    out.profile.u = chosen.u;
    out.profile.v = chosen.v;
    return out;
}

}  // namespace csgnash
