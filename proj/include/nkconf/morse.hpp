#ifndef NKCONF_MORSE_HPP
#define NKCONF_MORSE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nkconf/complex.hpp"
#include "nkconf/subdivision.hpp"

namespace nkconf {

enum class cell_role : std::uint8_t { critical, redundant, collapsible };

inline std::string role_name(cell_role r) {
    switch (r) {
        case cell_role::critical: return "critical";
        case cell_role::redundant: return "redundant";
        default: return "collapsible";
    }
}

// Rank and pairing data of one external cell.
struct rank_info {
    int rank = 0;  // minimal s with property R(s), 1-based
    int t = 0;     // largest coordinate holding iota(e_rank) or e_rank, 1-based
    cell_role role = cell_role::critical;
};

// The collapse pairing on a DConf^k(G', n) complex: per (dimension, cell
// index) role, partner index in the adjacent dimension, and rank/t values.
struct matching_record {
    std::vector<std::vector<cell_role>> role;
    std::vector<std::vector<std::int32_t>> partner;  // -1 for critical cells
    std::vector<std::vector<std::int32_t>> rank;     // 0 for critical cells
    std::vector<std::vector<std::int32_t>> tval;     // 0 for critical cells
    std::size_t num_pairs = 0;
    std::size_t num_critical = 0;
    std::size_t num_external = 0;
};

// Property R(s): every coordinate whose closure touches v_s equals e_s.
bool has_property_r(const cell& xp, const subdivision_context& ctx, int s);

// Minimal s with R(s), plus the pairing coordinate and role. The cell must
// be external; a missing rank within 1..ell is reported as a sufficiency
// violation via verification_error.
rank_info rank_of(const cell& xp, const subdivision_context& ctx, int k);

// The matched cell: toggles coordinate t between iota(e_j) and e_j.
cell partner(const cell& xp, const subdivision_context& ctx, int k);

// Pairs every external cell of cv and certifies that the unpaired cells are
// exactly those of y. Refuses a base graph that is not (k,n)-sufficiently
// subdivided.
matching_record build_matching(const complex_view& cv, const subdivision_context& ctx,
                               const complex_view& y);

struct acyclicity_result {
    bool ok = false;
    std::vector<cell> cycle;  // alternating cell sequence when a cycle exists
};

// Both checkers run on the modified Hasse diagram: an alternating-cycle
// search per dimension pair, and a full topological sort. Their verdicts
// must agree.
acyclicity_result verify_acyclic(const complex_view& cv, const matching_record& m);

// True iff every codim-1 face of every critical cell is critical.
bool verify_critical_subcomplex(const complex_view& cv, const matching_record& m);

struct coherence_result {
    bool ok = true;
    std::string detail;       // first violation found
    std::string offending;    // canonical key of the offending cell
};

// Re-derives rank/t/role of every paired cell and checks that each pair is a
// single-coordinate iota(e_j) <-> e_j toggle with shared rank and t.
coherence_result verify_pair_coherence(const complex_view& cv, const subdivision_context& ctx,
                                       const matching_record& m);

// Betti numbers of the Morse complex over F2: boundaries count gradient
// paths between critical cells mod 2. Requires an acyclic matching.
std::vector<long> morse_betti(const complex_view& cv, const matching_record& m);

struct lemma_check_report {
    bool field_nonempty = true;       // eta(iota(e_j)) + eta(e_j) >= 1 per external cell
    bool rank_bound = true;           // rank <= ell
    bool cycle_case_bound = true;          // cycle case with i = l-1: rank <= l-2
    bool face_op_stability = true;    // closure-count sets stable under iota-type faces
    bool field_well_defined = true;   // externality/rank transfer along iota-type faces
    bool downstep_classification = true;  // every down-step between external cells
                                          // falls in exactly one admissible case
    bool const_rank = true;           // rank equality for e_s-removing down-steps
    std::string const_diff = "ok";    // "ok" | "skipped" | "fail"
    std::string detail;               // first violation
    bool all_ok() const {
        return field_nonempty && rank_bound && cycle_case_bound && face_op_stability &&
               field_well_defined && downstep_classification && const_rank &&
               const_diff != "fail";
    }
    std::string to_json_text() const;
};

// Exhaustive per-instance verification of the structural facts the pairing
// construction relies on.
lemma_check_report check_lemmas(const complex_view& cv, const subdivision_context& ctx,
                                const matching_record& m);

// JSON-lines: {"cell":., "role":.} for critical cells, plus rank, t and
// partner for external ones.
void write_matching(std::ostream& out, const complex_view& cv, const matching_record& m);

} // namespace nkconf

#endif
