#pragma once

#include <functional>
#include <vector>

#include "cospace/data.hpp"
#include "cospace/graph.hpp"

namespace cospace {

struct Hyperparams {
  double alpha = 0.01;  // weight of (alpha/2)||P||_F^2
  double beta = 0.01;   // weight of the manifold alignment term
  int dim = 30;         // subspace dimension d
  int outer_max_iter = 100;
  double outer_tol = 1e-4;  // relative objective change that stops the outer loop
  int inner_max_iter = 500;
  double inner_tol = 1e-6;  // ADMM primal residual threshold
  double mu0 = 1e-3;
  double mu_max = 1e6;
  double rho = 1.5;

  // `features` is d_M + d_H; dim above it makes Theta Theta^T = I infeasible.
  void validate(Index features) const;
};

struct ObjectiveBreakdown {
  double fidelity = 0.0;  // 0.5 ||Y~ - P Theta X~||_F^2
  double p_reg = 0.0;     // (alpha/2) ||P||_F^2
  double align = 0.0;     // (beta/2) tr(Theta X~ L (Theta X~)^T)
  double total = 0.0;
};

// Iterates of the inner ADMM loop. j matches Theta X~ (d x 2N); g, lambda2 match Theta.
struct AdmmState {
  Matrix theta;
  Matrix j;
  Matrix g;
  Matrix lambda1;
  Matrix lambda2;
  double mu = 0.0;
  int iter = 0;
};

struct AdmmResult {
  Matrix theta;  // the row-orthonormal G iterate
  bool converged = false;
  int iterations = 0;
  double residual_j = 0.0;  // ||J - Theta X~||_F at exit
  double residual_g = 0.0;  // ||G - Theta||_F at exit
};

// Problem data shared by every inner iteration of one fit. `xtilde` may be a rescaled
// copy X~ / scale of the original system; residual_j is always reported in original units.
struct ThetaProblem {
  Matrix xtilde;
  const Matrix* ytilde = nullptr;
  Matrix xxt;   // xtilde xtilde^T
  Matrix xlxt;  // xtilde L xtilde^T
  double scale = 1.0;
};

ThetaProblem make_theta_problem(const StackedSystem& sys, const JointGraph& graph);

// The same Theta subproblem with X~ divided by c, chosen so the top eigenvalue of X~ X~^T becomes 30.
// Minimizing over Theta with
// (c P, X~ / c, beta c^2) is identical to minimizing with (P, X~, beta), but the split ADMM
// iterations are far better conditioned.
ThetaProblem normalized(const ThetaProblem& problem);

// Called after each complete inner iteration (after the penalty update).
using AdmmObserver = std::function<void(const AdmmState&)>;

struct OuterStep {
  int inner_iterations = 0;
  bool inner_converged = false;
  double residual_j = 0.0;
  double residual_g = 0.0;
  bool accepted = true;  // false when the inner result would have raised the objective
};

struct CoSpaceModel {
  Matrix theta;  // d x (d_M + d_H), rows orthonormal
  Matrix p;      // L x d
  Hyperparams hyper;
  std::vector<double> objective_trace;  // entry 0 is the initial point
  std::vector<OuterStep> steps;
  bool converged = false;
  Index ms_bands = 0;
  Index hs_bands = 0;

  int outer_iterations() const { return static_cast<int>(steps.size()); }
  int num_classes() const { return static_cast<int>(p.rows()); }
  auto theta_ms() const { return theta.leftCols(ms_bands); }
  auto theta_hs() const { return theta.rightCols(hs_bands); }
};

ObjectiveBreakdown objective(const StackedSystem& sys, const JointGraph& graph, const Matrix& p,
                             const Matrix& theta, const Hyperparams& hyper);
ObjectiveBreakdown objective(const ThetaProblem& problem, const Matrix& p, const Matrix& theta,
                             const Hyperparams& hyper);

// P = (Y~ Q^T)(Q Q^T + alpha I)^-1
Matrix update_p(const Matrix& ytilde, const Matrix& q, double alpha);

// J = (P^T P + mu I)^-1 (P^T Y~ + mu Theta X~ - Lambda1)
Matrix admm_update_j(const AdmmState& state, const Matrix& p, const Matrix& ytilde, const Matrix& xtilde);

// Theta = (mu J X~^T + Lambda1 X~^T + mu G + Lambda2)(mu X~ X~^T + mu I + beta X~ L X~^T)^-1
Matrix admm_update_theta(const AdmmState& state, const Matrix& xtilde, const Matrix& lap, double beta);
Matrix admm_update_theta(const AdmmState& state, const ThetaProblem& problem, double beta);

// Orthogonal Procrustes projection of Theta - Lambda2/mu onto {G : G G^T = I}.
Matrix admm_update_g(const Matrix& theta, const Matrix& lambda2, double mu);

// Multiplier ascent followed by mu = min(rho mu, mu_max).
AdmmState admm_update_duals(AdmmState state, const Matrix& xtilde, const Hyperparams& hyper);

// Augmented Lagrangian of the split Theta subproblem at `state` (with its current mu).
double augmented_lagrangian(const AdmmState& state, const Matrix& p, const ThetaProblem& problem, double beta);

AdmmResult solve_theta_admm(const Matrix& p, const ThetaProblem& problem, const Hyperparams& hyper,
                            const Matrix* warm_start = nullptr, const AdmmObserver& observer = {});
AdmmResult solve_theta_admm(const Matrix& p, const StackedSystem& sys, const JointGraph& graph,
                            const Hyperparams& hyper, const Matrix* warm_start = nullptr,
                            const AdmmObserver& observer = {});

// Top-d left singular directions of X~ as orthonormal rows, first nonzero entry positive.
Matrix initial_theta(const Matrix& xxt, int dim);

CoSpaceModel fit(const PairedDataset& ds, const Hyperparams& hyper, const AdmmObserver& observer = {});

Matrix embed_ms(const CoSpaceModel& model, const Matrix& x);
Matrix embed_hs(const CoSpaceModel& model, const Matrix& x);

// ||A A^T - I||_F
double orthogonality_error(const Matrix& a);

}  // namespace cospace
