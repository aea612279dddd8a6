#include "properties.hpp"

#include <doctest.h>

using namespace ezt;

namespace {

void check_run(const PropertyRun& r) {
    CAPTURE(r.name);
    CAPTURE(r.first_failing_case);
    CHECK(r.cases >= 1000);
    CHECK(r.failures == 0);
}

}  // namespace

TEST_CASE("compute_seq is monotone in deps and exceeds every dep") { check_run(compute_seq_monotone(1000)); }

TEST_CASE("interferes is symmetric") { check_run(interferes_symmetric(1000)); }

TEST_CASE("select_safe_tuple ignores vote order and is deterministic") { check_run(selection_order_invariant(1000)); }

TEST_CASE("honest adversary choices behave like correct nodes") { check_run(honest_choice_equivalence(1000)); }
