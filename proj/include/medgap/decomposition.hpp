#pragma once

// Shared result type for the Oaxaca-Blinder and IPW gap decompositions. All
// components are reported in "group 1 minus group 0" orientation (by the
// bundled convention: male minus female), for both reference groups.

#include <array>

#include "medgap/dataset.hpp"
#include "medgap/numkit.hpp"

namespace medgap {

// Order used wherever component vectors appear (bootstrap, reports, tests).
inline constexpr std::array<const char*, 5> kComponentNames = {
    "total_mf", "indirect_ref_female", "direct_ref_female",
    "indirect_ref_male", "direct_ref_male"};
inline constexpr std::size_t kNumComponents = 5;

struct DecompositionResult {
    double total_gap = 0.0;
    double indirect_ref_female = 0.0;
    double direct_ref_female = 0.0;
    double indirect_ref_male = 0.0;
    double direct_ref_male = 0.0;
    Vector standard_errors;  // kNumComponents entries once inference is attached
    Vector p_values;
    std::size_t n_dropped_missing = 0;
    std::size_t n_trimmed = 0;  // always 0 for Oaxaca-Blinder
    std::size_t n_used = 0;
    std::size_t n_failed_replicates = 0;
    MediatorSet mediator_set = MediatorSet::m1;

    Vector components() const;
    void set_components(const Eigen::Ref<const Vector>& values);
};

}  // namespace medgap
