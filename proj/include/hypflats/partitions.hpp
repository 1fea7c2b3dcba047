#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hypflats {

// Sub-partition of the cell array with rows of sizes n_1..n_l; cells are
// (row, column) pairs.  Blocks are disjoint and meet every row at most once.
struct diagram {
    std::vector<int> row_sizes;
    std::vector<std::vector<std::pair<int, int>>> blocks;

    int block_count() const { return static_cast<int>(blocks.size()); }
    int covered_cells() const {
        int n = 0;
        for (const auto& b : blocks)
            n += static_cast<int>(b.size());
        return n;
    }
};

// The diagram families of the moment and cumulant formulas:
//   star           sub-partitions, row-injective blocks of any size
//   star_ge2       as star, all blocks of size >= 2
//   star_star_ge2  as star_ge2, every row meets at least one block
//   ge2            full partitions, row-injective, blocks >= 2
//   con_ge2        as ge2, diagram connected across rows
enum class diagram_class { star, star_ge2, star_star_ge2, ge2, con_ge2 };

namespace detail {

struct diagram_enumerator {
    const std::vector<int>& sizes;
    diagram_class cls;
    int rows;
    std::vector<std::pair<int, int>> cells; // row-major order
    std::vector<std::vector<int>> block_cells;
    std::vector<unsigned> block_rows; // row bitmask per block
    std::vector<diagram>& out;

    diagram_enumerator(const std::vector<int>& s, diagram_class c,
                       std::vector<diagram>& o)
        : sizes(s), cls(c), rows(static_cast<int>(s.size())), out(o) {
        for (int r = 0; r < rows; ++r)
            for (int col = 0; col < s[r]; ++col)
                cells.emplace_back(r, col);
    }

    bool full() const {
        return cls == diagram_class::ge2 || cls == diagram_class::con_ge2;
    }

    void emit() {
        if (cls != diagram_class::star)
            for (const auto& b : block_cells)
                if (b.size() < 2)
                    return;
        if (cls == diagram_class::star_star_ge2) {
            unsigned covered = 0;
            for (unsigned m : block_rows)
                covered |= m;
            if (covered != (1u << rows) - 1u)
                return;
        }
        if (cls == diagram_class::con_ge2) {
            // union-find over rows linked by shared blocks
            int parent[32];
            for (int r = 0; r < rows; ++r)
                parent[r] = r;
            auto find = [&](int x) {
                while (parent[x] != x)
                    x = parent[x] = parent[parent[x]];
                return x;
            };
            for (unsigned m : block_rows) {
                int first = -1;
                for (int r = 0; r < rows; ++r)
                    if (m & (1u << r)) {
                        if (first < 0)
                            first = r;
                        else
                            parent[find(r)] = find(first);
                    }
            }
            const int root = find(0);
            for (int r = 1; r < rows; ++r)
                if (find(r) != root)
                    return;
        }
        diagram dg;
        dg.row_sizes = sizes;
        dg.blocks.resize(block_cells.size());
        for (std::size_t b = 0; b < block_cells.size(); ++b)
            for (int cell : block_cells[b])
                dg.blocks[b].push_back(cells[cell]);
        out.push_back(std::move(dg));
    }

    void recurse(std::size_t cell) {
        if (cell == cells.size()) {
            emit();
            return;
        }
        const unsigned row_bit = 1u << cells[cell].first;
        // join an existing block that does not yet meet this row
        for (std::size_t b = 0; b < block_cells.size(); ++b) {
            if (block_rows[b] & row_bit)
                continue;
            block_cells[b].push_back(static_cast<int>(cell));
            block_rows[b] |= row_bit;
            recurse(cell + 1);
            block_rows[b] &= ~row_bit;
            block_cells[b].pop_back();
        }
        // open a new block at this cell (blocks stay ordered by least cell,
        // so every sub-partition is generated exactly once)
        block_cells.push_back({static_cast<int>(cell)});
        block_rows.push_back(row_bit);
        recurse(cell + 1);
        block_rows.pop_back();
        block_cells.pop_back();
        // leave the cell uncovered (sub-partition classes only)
        if (!full())
            recurse(cell + 1);
    }
};

} // namespace detail

inline std::vector<diagram> enumerate_diagrams(diagram_class cls,
                                               const std::vector<int>& row_sizes) {
    if (row_sizes.empty())
        throw std::invalid_argument("enumerate_diagrams: no rows");
    int total = 0;
    for (int n : row_sizes) {
        if (n < 1)
            throw std::invalid_argument("enumerate_diagrams: row size < 1");
        total += n;
    }
    if (total > 20)
        throw std::invalid_argument(
            "enumerate_diagrams: more than 20 cells; enumeration guard");
    if (row_sizes.size() > 20)
        throw std::invalid_argument("enumerate_diagrams: more than 20 rows");
    std::vector<diagram> out;
    detail::diagram_enumerator en(row_sizes, cls, out);
    en.recurse(0);
    return out;
}

namespace detail {

// Row permutations that keep the row-size profile fixed.  Identical kernels
// sit in equal-size rows, so these are exactly the symmetries that leave the
// identified integrals invariant.
inline std::vector<std::vector<int>>
size_preserving_row_perms(const std::vector<int>& sizes) {
    const int rows = static_cast<int>(sizes.size());
    std::vector<int> perm(rows);
    for (int r = 0; r < rows; ++r)
        perm[r] = r;
    std::vector<std::vector<int>> out;
    do {
        bool ok = true;
        for (int r = 0; r < rows; ++r)
            if (sizes[perm[r]] != sizes[r]) {
                ok = false;
                break;
            }
        if (ok)
            out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

} // namespace detail

// Canonical label of a diagram's equivalence class.  Column permutations
// within a row never change which rows a block meets, and row-injectivity
// makes the multiset of per-block row sets a complete invariant for them;
// the key is that multiset, minimized over size-preserving row relabelings.
inline std::vector<unsigned>
diagram_canonical_key(const diagram& dg,
                      const std::vector<std::vector<int>>& row_perms) {
    std::vector<unsigned> masks(dg.blocks.size(), 0u);
    for (std::size_t b = 0; b < dg.blocks.size(); ++b)
        for (const auto& cell : dg.blocks[b])
            masks[b] |= 1u << cell.first;
    std::vector<unsigned> best, cur(masks.size());
    for (const auto& perm : row_perms) {
        for (std::size_t b = 0; b < masks.size(); ++b) {
            unsigned m = 0;
            for (std::size_t r = 0; r < perm.size(); ++r)
                if (masks[b] & (1u << r))
                    m |= 1u << perm[r];
            cur[b] = m;
        }
        std::sort(cur.begin(), cur.end());
        if (best.empty() || cur < best)
            best = cur;
    }
    return best;
}

// Class sizes keyed by canonical label; the sum of the values recovers the
// labeled count (orbit bookkeeping).
inline std::map<std::vector<unsigned>, long>
equivalence_class_sizes(const std::vector<diagram>& diagrams) {
    std::map<std::vector<unsigned>, long> classes;
    if (diagrams.empty())
        return classes;
    const auto perms =
        detail::size_preserving_row_perms(diagrams.front().row_sizes);
    for (const diagram& dg : diagrams) {
        if (dg.row_sizes != diagrams.front().row_sizes)
            throw std::invalid_argument(
                "equivalence_class_sizes: diagrams mix row-size profiles");
        ++classes[diagram_canonical_key(dg, perms)];
    }
    return classes;
}

inline int equivalence_classes(const std::vector<diagram>& diagrams) {
    return static_cast<int>(equivalence_class_sizes(diagrams).size());
}

} // namespace hypflats
