#pragma once

// Linear Oaxaca-Blinder decomposition of a group mean gap into indirect
// (explained) and direct (unexplained) components, for both reference groups.

#include <string>
#include <vector>

#include "medgap/decomposition.hpp"

namespace medgap {

// Core kernel on clean vectors: fits outcome ~ [1, mediators] per group and
// assembles [total, indir.f, dir.f, indir.m, dir.m]. Optional names make
// rank-deficiency errors speak in column names.
Vector oaxaca_components(const Eigen::Ref<const Vector>& outcome,
                         const Eigen::Ref<const Vector>& group,
                         const Eigen::Ref<const Matrix>& mediators,
                         const std::vector<std::string>* mediator_names = nullptr);

// Listwise deletion on {G, Y, selected mediators}, then the kernel. When
// include_controls is set, the W columns enter the group regressions as extra
// regressors; the indirect component still aggregates mediator gaps only and
// the direct component is total minus indirect.
DecompositionResult oaxaca_decompose(const Dataset& data, const RoleMap& roles,
                                     MediatorSet mediator_set,
                                     bool include_controls = false);

}  // namespace medgap
