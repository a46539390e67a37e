#pragma once

// Semiparametric IPW mediation decomposition: probit propensity scores
// Pr(G=1|W) and Pr(G=1|X,W), trimming of extreme scores, and normalized
// (Hajek) weights for the direct/indirect components under both reference
// groups.

#include <utility>
#include <vector>

#include "medgap/decomposition.hpp"

namespace medgap {

struct PropensityPair {
    Vector p_w;   // Pr(G=1 | W)
    Vector p_xw;  // Pr(G=1 | X, W)
};

struct TrimmingPolicy {
    double lower = 0.02;
    double upper = 0.98;
};

enum class TrimRule { both_scores, xw_only };

// Two probit fits on the given rows: G ~ [1, W] and G ~ [1, X, W].
PropensityPair estimate_propensities(const Dataset& data, const RoleMap& roles,
                                     MediatorSet mediator_set,
                                     const std::vector<std::size_t>& rows);

// Kept (local) indices plus the dropped count. Under both_scores a row is
// dropped iff either score falls outside [lower, upper].
std::pair<std::vector<Index>, std::size_t> trim(const PropensityPair& scores,
                                                const TrimmingPolicy& policy,
                                                TrimRule rule = TrimRule::both_scores);

// Normalized-weight component kernel on clean vectors, reference group 1:
//   psi = sum w1 Y G - sum w2 Y G,  eta = sum w2 Y G - sum w3 Y (1-G)
// with raw weights 1/p(W), [1-p(X,W)]/[p(X,W)(1-p(W))], 1/(1-p(W)), each
// normalized to sum to one within its group. The reference-group-0 components
// come from the same formulas with groups and scores exchanged, reported in
// group-1-minus-group-0 orientation. Returns [total, indir.f, dir.f,
// indir.m, dir.m].
Vector ipw_components_from_scores(const Eigen::Ref<const Vector>& outcome,
                                  const Eigen::Ref<const Vector>& group,
                                  const Eigen::Ref<const Vector>& p_w,
                                  const Eigen::Ref<const Vector>& p_xw);

// Full pipeline: listwise deletion -> probit fits -> trimming -> weights
// renormalized on the trimmed sample.
DecompositionResult ipw_mediation(const Dataset& data, const RoleMap& roles,
                                  MediatorSet mediator_set,
                                  const TrimmingPolicy& policy = {},
                                  TrimRule rule = TrimRule::both_scores);

}  // namespace medgap
