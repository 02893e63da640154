#include "csgnash/end_components.hpp"

#include <algorithm>
#include <map>

namespace csgnash {

std::vector<std::size_t> strongly_connected_components(const std::vector<std::vector<StateId>>& adj,
                                                       std::size_t& count) {
    // Iterative Tarjan.
    const std::size_t n = adj.size();
    constexpr std::size_t kUnset = SIZE_MAX;
    std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
    std::vector<bool> on_stack(n, false);
    std::vector<StateId> stack;
    std::vector<std::pair<StateId, std::size_t>> call;
    std::size_t next = 0;
    count = 0;
    for (StateId root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        call.push_back({root, 0});
        index[root] = low[root] = next++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, edge] = call.back();
            if (edge < adj[v].size()) {
                StateId w = adj[v][edge++];
                if (index[w] == kUnset) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                StateId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            StateId done = v;
            call.pop_back();
            if (!call.empty()) {
                StateId parent = call.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }
    return comp;
}

std::vector<EndComponent> enumerate_mecs(const Csg& g, const StateSet* within) {
    const std::size_t n = g.num_states();
    std::vector<bool> alive_state = within ? *within : std::vector<bool>(n, true);
    std::vector<bool> alive_row(g.num_rows(), true);

    bool changed = true;
    std::vector<std::size_t> comp;
    while (changed) {
        changed = false;
        std::vector<std::vector<StateId>> adj(n);
        for (StateId s = 0; s < n; ++s) {
            if (!alive_state[s]) continue;
            for (std::size_t r = g.row_begin(s); r < g.row_end(s); ++r) {
                if (!alive_row[r]) continue;
                for (std::size_t t = g.trans_begin(r); t < g.trans_end(r); ++t)
                    if (alive_state[g.succ(t)]) adj[s].push_back(g.succ(t));
            }
        }
        std::size_t count = 0;
        comp = strongly_connected_components(adj, count);
        for (StateId s = 0; s < n; ++s) {
            if (!alive_state[s]) continue;
            bool any = false;
            for (std::size_t r = g.row_begin(s); r < g.row_end(s); ++r) {
                if (!alive_row[r]) continue;
                bool stays = true;
                for (std::size_t t = g.trans_begin(r); t < g.trans_end(r) && stays; ++t) {
                    StateId u = g.succ(t);
                    stays = alive_state[u] && comp[u] == comp[s];
                }
                if (!stays) {
                    alive_row[r] = false;
                    changed = true;
                } else {
                    any = true;
                }
            }
            if (!any) {
                alive_state[s] = false;
                changed = true;
            }
        }
    }

    std::map<std::size_t, EndComponent> by_comp;
    for (StateId s = 0; s < n; ++s) {
        if (!alive_state[s]) continue;
        auto& ec = by_comp[comp[s]];
        ec.states.push_back(s);
        for (std::size_t r = g.row_begin(s); r < g.row_end(s); ++r) {
            if (alive_row[r]) ec.rows.push_back(r);
            else ec.non_terminal = true;
        }
    }
    std::vector<EndComponent> out;
    for (auto& [c, ec] : by_comp) {
        // Rows removed earlier may still stay inside the final component; the
        // flag must reflect rows that actually leave it.
        ec.non_terminal = false;
        for (StateId s : ec.states)
            for (std::size_t r = g.row_begin(s); r < g.row_end(s) && !ec.non_terminal; ++r)
                for (std::size_t t = g.trans_begin(r); t < g.trans_end(r); ++t)
                    if (!std::binary_search(ec.states.begin(), ec.states.end(), g.succ(t))) {
                        ec.non_terminal = true;
                        break;
                    }
        out.push_back(std::move(ec));
    }
    std::sort(out.begin(), out.end(), [](const EndComponent& a, const EndComponent& b) { return a.states[0] < b.states[0]; });
    return out;
}

}  // namespace csgnash
