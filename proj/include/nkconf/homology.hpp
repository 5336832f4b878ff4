#ifndef NKCONF_HOMOLOGY_HPP
#define NKCONF_HOMOLOGY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nkconf/complex.hpp"

namespace nkconf {

enum class coeff_field { rational, mod2 };

inline std::string field_name(coeff_field f) { return f == coeff_field::rational ? "q" : "f2"; }

// Sparse integer matrix, column-major; entries sorted by row within a column.
struct sparse_matrix {
    int rows = 0, cols = 0;
    std::vector<std::vector<std::pair<std::int32_t, std::int64_t>>> columns;

    std::size_t nnz() const {
        std::size_t s = 0;
        for (const auto& c : columns) s += c.size();
        return s;
    }
};

// Boundary from d-cells to (d-1)-cells with cubical signs: collapsing the
// r-th edge coordinate (0-based among edge coordinates) contributes
// (-1)^r on the face at the source endpoint and -(-1)^r at the target,
// where edges are globally oriented from their smaller endpoint label.
// mod2 drops signs. Loops are rejected.
sparse_matrix boundary_matrix(const complex_view& cv, int d, coeff_field f);

// Exact rank. Rational: fraction-free elimination over int64 with overflow
// guards. mod2: column reduction with a pivot map.
long matrix_rank(const sparse_matrix& m, coeff_field f);

// b_d = dim ker boundary_d - rank boundary_{d+1}; the Euler characteristic
// from cell counts is cross-checked against the alternating Betti sum.
std::vector<long> betti_numbers(const complex_view& cv, coeff_field f,
                                long* euler_out = nullptr);

long euler_characteristic(const complex_view& cv);

// "rows cols nnz" header then one "row col value" triplet per line.
void write_triplets(std::ostream& out, const sparse_matrix& m);

// {"betti": [...], "coeff": "...", "euler": chi}
std::string betti_json(const std::vector<long>& betti, coeff_field f, long euler);

// Zero-padded equality, so (2,0) and (2,0,0) agree.
bool betti_equal(const std::vector<long>& a, const std::vector<long>& b);

} // namespace nkconf

#endif
