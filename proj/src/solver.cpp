#include "cospace/solver.hpp"

#include <cmath>
#include <string>

#include "cospace/linalg.hpp"

namespace cospace {

void Hyperparams::validate(Index features) const {
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be nonnegative");
  require(std::isfinite(beta) && beta >= 0.0, "beta must be nonnegative");
  require(dim >= 1, "dim must be at least 1");
  require(dim <= features, "dim = " + std::to_string(dim) + " exceeds d_M + d_H = " + std::to_string(features) +
                               "; the constraint Theta Theta^T = I is infeasible");
  require(outer_max_iter >= 1 && inner_max_iter >= 1, "iteration limits must be positive");
  require(outer_tol > 0.0 && inner_tol > 0.0, "tolerances must be positive");
  require(mu0 > 0.0 && mu0 <= mu_max, "penalty must satisfy 0 < mu0 <= mu_max");
  require(rho > 1.0, "rho must exceed 1");
}

ThetaProblem make_theta_problem(const StackedSystem& sys, const JointGraph& graph) {
  require(graph.size() == sys.samples(), "graph has " + std::to_string(graph.size()) + " nodes but the system has " +
                                             std::to_string(sys.samples()) + " samples");
  ThetaProblem problem;
  problem.xtilde = sys.xtilde;
  problem.ytilde = &sys.ytilde;
  problem.xxt = sys.xtilde * sys.xtilde.transpose();
  problem.xlxt = sys.xtilde * graph.lap * sys.xtilde.transpose();
  problem.xlxt = 0.5 * (problem.xlxt + problem.xlxt.transpose()).eval();
  return problem;
}

namespace {
constexpr double kNormalizedTop = 30.0;
}  // namespace

ThetaProblem normalized(const ThetaProblem& problem) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(problem.xxt, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().size() > 0 ? eig.eigenvalues().maxCoeff() : 0.0;
  if (!(top > 0.0)) return problem;
  const double c = std::sqrt(top / kNormalizedTop);
  ThetaProblem out;
  out.xtilde = problem.xtilde / c;
  out.ytilde = problem.ytilde;
  out.xxt = problem.xxt / (c * c);
  out.xlxt = problem.xlxt / (c * c);
  out.scale = problem.scale * c;
  return out;
}

double orthogonality_error(const Matrix& a) {
  return (a * a.transpose() - Matrix::Identity(a.rows(), a.rows())).norm();
}

namespace {

void check_shapes(const Matrix& ytilde, const Matrix& xtilde, const Matrix& p, const Matrix& theta) {
  require(theta.cols() == xtilde.rows(), "Theta has " + std::to_string(theta.cols()) + " columns but X~ has " +
                                             std::to_string(xtilde.rows()) + " rows");
  require(p.cols() == theta.rows(), "P has " + std::to_string(p.cols()) + " columns but Theta has " +
                                        std::to_string(theta.rows()) + " rows");
  require(p.rows() == ytilde.rows(), "P and Y~ disagree on the class count");
  require(ytilde.cols() == xtilde.cols(), "Y~ and X~ disagree on the sample count");
}

ObjectiveBreakdown assemble(double fidelity, double p_sq, double align_tr, const Hyperparams& hyper) {
  ObjectiveBreakdown out;
  out.fidelity = 0.5 * fidelity;
  out.p_reg = 0.5 * hyper.alpha * p_sq;
  out.align = 0.5 * hyper.beta * align_tr;
  out.total = out.fidelity + out.p_reg + out.align;
  return out;
}

}  // namespace

ObjectiveBreakdown objective(const StackedSystem& sys, const JointGraph& graph, const Matrix& p, const Matrix& theta,
                             const Hyperparams& hyper) {
  check_shapes(sys.ytilde, sys.xtilde, p, theta);
  require(graph.size() == sys.samples(), "graph and system disagree on the sample count");
  const Matrix q = theta * sys.xtilde;
  const double align_tr = (q * graph.lap * q.transpose()).trace();
  return assemble((sys.ytilde - p * q).squaredNorm(), p.squaredNorm(), align_tr, hyper);
}

ObjectiveBreakdown objective(const ThetaProblem& problem, const Matrix& p, const Matrix& theta,
                             const Hyperparams& hyper) {
  check_shapes(*problem.ytilde, problem.xtilde, p, theta);
  const Matrix q = theta * problem.xtilde;
  const double align_tr = (theta * problem.xlxt * theta.transpose()).trace();
  return assemble((*problem.ytilde - p * q).squaredNorm(), p.squaredNorm(), align_tr, hyper);
}

Matrix update_p(const Matrix& ytilde, const Matrix& q, double alpha) {
  require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be nonnegative");
  require(ytilde.cols() == q.cols(), "Y~ and Q disagree on the sample count");
  const Index d = q.rows();
  const Matrix gram = q * q.transpose() + alpha * Matrix::Identity(d, d);
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13)) {
    throw NumericalError("P update: Q Q^T + alpha I is singular; use alpha > 0");
  }
  // P gram = Y~ Q^T  <=>  gram P^T = Q Y~^T (gram is symmetric)
  return llt.solve(q * ytilde.transpose()).transpose();
}

Matrix admm_update_j(const AdmmState& state, const Matrix& p, const Matrix& ytilde, const Matrix& xtilde) {
  require(state.mu > 0.0, "mu must be positive");
  const Index d = p.cols();
  const Matrix lhs = p.transpose() * p + state.mu * Matrix::Identity(d, d);
  const Matrix rhs = p.transpose() * ytilde + state.mu * (state.theta * xtilde) - state.lambda1;
  return spd_solve(lhs, rhs, "J update");
}

namespace {

Matrix solve_theta(const AdmmState& state, const Matrix& xtilde, const Matrix& xxt, const Matrix& xlxt,
                   double beta) {
  require(state.mu > 0.0, "mu must be positive");
  if (!state.j.allFinite() || !state.g.allFinite() || !state.lambda1.allFinite() || !state.lambda2.allFinite()) {
    throw NumericalError("Theta update: non-finite input");
  }
  const double mu = state.mu;
  const Index features = xtilde.rows();
  const Matrix lhs = mu * xxt + mu * Matrix::Identity(features, features) + beta * xlxt;
  const Matrix rhs = (mu * state.j + state.lambda1) * xtilde.transpose() + mu * state.g + state.lambda2;
  // Theta lhs = rhs  <=>  lhs Theta^T = rhs^T
  return spd_solve(lhs, rhs.transpose(), "Theta update").transpose();
}

}  // namespace

Matrix admm_update_theta(const AdmmState& state, const Matrix& xtilde, const Matrix& lap, double beta) {
  require(lap.rows() == xtilde.cols() && lap.cols() == xtilde.cols(), "Laplacian does not match X~");
  const Matrix xxt = xtilde * xtilde.transpose();
  Matrix xlxt = xtilde * lap * xtilde.transpose();
  xlxt = 0.5 * (xlxt + xlxt.transpose()).eval();
  return solve_theta(state, xtilde, xxt, xlxt, beta);
}

Matrix admm_update_theta(const AdmmState& state, const ThetaProblem& problem, double beta) {
  return solve_theta(state, problem.xtilde, problem.xxt, problem.xlxt, beta);
}

Matrix admm_update_g(const Matrix& theta, const Matrix& lambda2, double mu) {
  require(mu > 0.0, "mu must be positive");
  require(theta.rows() == lambda2.rows() && theta.cols() == lambda2.cols(), "Theta and Lambda2 shapes differ");
  require(theta.rows() <= theta.cols(), "G update needs at least as many columns as rows");
  const Matrix m = theta - lambda2 / mu;
  if (!m.allFinite()) throw NumericalError("G update: non-finite input");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0) || s(s.size() - 1) <= 1e-12 * s(0)) {
    throw NumericalError("G update: Theta - Lambda2/mu is rank deficient, projection is not unique");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

AdmmState admm_update_duals(AdmmState state, const Matrix& xtilde, const Hyperparams& hyper) {
  const double mu = state.mu;
  state.lambda1 += mu * (state.j - state.theta * xtilde);
  state.lambda2 += mu * (state.g - state.theta);
  state.mu = std::min(hyper.rho * mu, hyper.mu_max);
  return state;
}

double augmented_lagrangian(const AdmmState& state, const Matrix& p, const ThetaProblem& problem, double beta) {
  const Matrix q = state.theta * problem.xtilde;
  const Matrix rj = state.j - q;
  const Matrix rg = state.g - state.theta;
  return 0.5 * (*problem.ytilde - p * state.j).squaredNorm() +
         0.5 * beta * (state.theta * problem.xlxt * state.theta.transpose()).trace() +
         (state.lambda1.array() * rj.array()).sum() + (state.lambda2.array() * rg.array()).sum() +
         0.5 * state.mu * rj.squaredNorm() + 0.5 * state.mu * rg.squaredNorm();
}

AdmmResult solve_theta_admm(const Matrix& p, const ThetaProblem& problem, const Hyperparams& hyper,
                            const Matrix* warm_start, const AdmmObserver& observer) {
  const Matrix& xtilde = problem.xtilde;
  const Matrix& ytilde = *problem.ytilde;
  const Index d = p.cols();
  const Index features = xtilde.rows();
  const Index samples = xtilde.cols();
  require(p.rows() == ytilde.rows(), "P and Y~ disagree on the class count");

  AdmmState state;
  if (warm_start != nullptr) {
    require(warm_start->rows() == d && warm_start->cols() == features, "warm start has the wrong shape");
    state.theta = *warm_start;
  } else {
    state.theta = Matrix::Zero(d, features);
  }
  state.g = Matrix::Zero(d, features);
  state.lambda1 = Matrix::Zero(d, samples);
  state.lambda2 = Matrix::Zero(d, features);
  state.mu = hyper.mu0;

  AdmmResult result;
  for (int it = 1; it <= hyper.inner_max_iter; ++it) {
    state.iter = it;
    state.j = admm_update_j(state, p, ytilde, xtilde);
    state.theta = admm_update_theta(state, problem, hyper.beta);
    state.g = admm_update_g(state.theta, state.lambda2, state.mu);
    result.residual_j = problem.scale * (state.j - state.theta * xtilde).norm();
    result.residual_g = (state.g - state.theta).norm();
    state = admm_update_duals(std::move(state), xtilde, hyper);
    if (observer) observer(state);
    result.iterations = it;
    if (result.residual_j < hyper.inner_tol && result.residual_g < hyper.inner_tol) {
      result.converged = true;
      break;
    }
  }
  result.theta = std::move(state.g);
  return result;
}

AdmmResult solve_theta_admm(const Matrix& p, const StackedSystem& sys, const JointGraph& graph,
                            const Hyperparams& hyper, const Matrix* warm_start, const AdmmObserver& observer) {
  hyper.validate(sys.features());
  const ThetaProblem problem = make_theta_problem(sys, graph);
  return solve_theta_admm(p, problem, hyper, warm_start, observer);
}

Matrix initial_theta(const Matrix& xxt, int dim) {
  const Index features = xxt.rows();
  require(dim >= 1 && dim <= features, "dim out of range for the initial projection");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(xxt);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of X~ X~^T failed");
  // Eigen sorts ascending; the leading directions are the last columns.
  Matrix theta = eig.eigenvectors().rightCols(dim).rowwise().reverse().transpose();
  canonicalize_row_signs(theta);
  return theta;
}

CoSpaceModel fit(const PairedDataset& ds, const Hyperparams& hyper, const AdmmObserver& observer) {
  ds.validate();
  require(ds.num_classes >= 2, "CoSpace needs at least 2 classes");
  const StackedSystem sys = stack_system(ds);
  hyper.validate(sys.features());
  const JointGraph graph = laplacian(lda_like_adjacency(stacked_labels(ds.labels)));
  const ThetaProblem problem = make_theta_problem(sys, graph);
  const ThetaProblem scaled = normalized(problem);
  Hyperparams inner_hyper = hyper;
  inner_hyper.beta = hyper.beta * scaled.scale * scaled.scale;

  CoSpaceModel model;
  model.hyper = hyper;
  model.ms_bands = ds.ms_bands();
  model.hs_bands = ds.hs_bands();
  model.theta = initial_theta(problem.xxt, hyper.dim);
  model.p = update_p(sys.ytilde, model.theta * sys.xtilde, hyper.alpha);
  double current = objective(problem, model.p, model.theta, hyper).total;
  model.objective_trace.push_back(current);

  for (int t = 1; t <= hyper.outer_max_iter; ++t) {
    const Matrix scaled_p = scaled.scale * model.p;
    const AdmmResult inner = solve_theta_admm(scaled_p, scaled, inner_hyper, &model.theta, observer);
    OuterStep step;
    step.inner_iterations = inner.iterations;
    step.inner_converged = inner.converged;
    step.residual_j = inner.residual_j;
    step.residual_g = inner.residual_g;
    // The inner solve targets a nonconvex constraint set; keep the previous Theta when
    // its answer would raise the objective so the outer sequence stays monotone.
    const double candidate = objective(problem, model.p, inner.theta, hyper).total;
    step.accepted = candidate <= current;
    if (step.accepted) model.theta = inner.theta;
    model.p = update_p(sys.ytilde, model.theta * sys.xtilde, hyper.alpha);
    const double next = objective(problem, model.p, model.theta, hyper).total;
    model.objective_trace.push_back(next);
    model.steps.push_back(step);
    const bool stalled = current <= 1e-15 || std::abs(next - current) / current < hyper.outer_tol;
    current = next;
    if (stalled) {
      model.converged = true;
      break;
    }
  }
  return model;
}

Matrix embed_ms(const CoSpaceModel& model, const Matrix& x) {
  require(x.rows() == model.ms_bands, "MS input has " + std::to_string(x.rows()) + " bands, model expects " +
                                          std::to_string(model.ms_bands));
  return model.theta_ms() * x;
}

Matrix embed_hs(const CoSpaceModel& model, const Matrix& x) {
  require(x.rows() == model.hs_bands, "HS input has " + std::to_string(x.rows()) + " bands, model expects " +
                                          std::to_string(model.hs_bands));
  return model.theta_hs() * x;
}

}  // namespace cospace
