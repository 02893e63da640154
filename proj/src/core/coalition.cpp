#include "csgnash/coalition.hpp"

#include <algorithm>

#include "csgnash/error.hpp"

namespace csgnash {

namespace {

// Decodes k into positions (first member slowest).
void decode(std::size_t k, const std::vector<std::size_t>& radix, std::vector<std::size_t>& out) {
    out.assign(radix.size(), 0);
    for (std::size_t m = radix.size(); m-- > 0;) {
        out[m] = k % radix[m];
        k /= radix[m];
    }
}

}  // namespace

CoalitionGame::CoalitionGame(const Csg& base, std::vector<PlayerId> coalition) : base_(&base) {
    std::sort(coalition.begin(), coalition.end());
    coalition.erase(std::unique(coalition.begin(), coalition.end()), coalition.end());
    for (PlayerId p : coalition)
        if (p >= base.num_players()) fail(ErrorCode::UnknownPlayer, "player index out of range");
    if (coalition.empty()) fail(ErrorCode::EmptyCoalition, "coalition is empty");
    if (coalition.size() == base.num_players()) fail(ErrorCode::FullCoalition, "coalition contains every player");
    first_ = coalition;
    for (PlayerId p = 0; p < base.num_players(); ++p)
        if (!std::binary_search(first_.begin(), first_.end(), p)) second_.push_back(p);

    const std::size_t n = base.num_players();
    const std::size_t ns = base.num_states();
    dims_.resize(2 * ns);
    offset_.resize(ns + 1);
    offset_[0] = 0;
    table_.reserve(base.num_rows());
    std::vector<std::size_t> r1, r2, p1, p2, pos(n);
    for (StateId s = 0; s < ns; ++s) {
        r1.clear();
        r2.clear();
        for (PlayerId p : first_) r1.push_back(base.available(s, p).size());
        for (PlayerId p : second_) r2.push_back(base.available(s, p).size());
        std::size_t l = 1, m = 1;
        for (auto v : r1) l *= v;
        for (auto v : r2) m *= v;
        dims_[2 * s] = l;
        dims_[2 * s + 1] = m;
        for (std::size_t i = 0; i < l; ++i) {
            decode(i, r1, p1);
            for (std::size_t k = 0; k < first_.size(); ++k) pos[first_[k]] = p1[k];
            for (std::size_t j = 0; j < m; ++j) {
                decode(j, r2, p2);
                for (std::size_t k = 0; k < second_.size(); ++k) pos[second_[k]] = p2[k];
                table_.push_back(base.row_of(s, pos));
            }
        }
        offset_[s + 1] = table_.size();
    }
}

std::vector<ActionId> CoalitionGame::tuple(StateId s, int side, std::size_t k) const {
    const auto& mem = members(side);
    std::vector<std::size_t> radix, pos;
    for (PlayerId p : mem) radix.push_back(base_->available(s, p).size());
    decode(k, radix, pos);
    std::vector<ActionId> out;
    for (std::size_t m = 0; m < mem.size(); ++m) out.push_back(base_->available(s, mem[m])[pos[m]]);
    return out;
}

std::string CoalitionGame::tuple_text(StateId s, int side, std::size_t k) const {
    auto t = tuple(s, side, k);
    if (t.size() == 1) return base_->action_name(t[0]);
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ",";
        out += base_->action_name(t[i]);
    }
    return out + ")";
}

std::vector<std::vector<ActionId>> CoalitionGame::alphabet(int side) const {
    std::vector<std::vector<ActionId>> out{{}};
    for (PlayerId p : members(side)) {
        std::vector<ActionId> letters = base_->alphabet(p);
        letters.push_back(kIdle);
        std::vector<std::vector<ActionId>> next;
        for (auto& prefix : out)
            for (ActionId a : letters) {
                auto t = prefix;
                t.push_back(a);
                next.push_back(std::move(t));
            }
        out = std::move(next);
    }
    return out;
}

}  // namespace csgnash
