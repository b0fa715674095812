#include "stoqmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "stoqmc/errors.hpp"

namespace stoqmc {
namespace {

void require_symmetric(const Eigen::MatrixXd& block) {
  if (block.rows() != block.cols()) {
    throw ValidationError("term block is not square (" + std::to_string(block.rows()) + "x" +
                          std::to_string(block.cols()) + ")");
  }
  if (!block.allFinite()) throw ValidationError("term block has non-finite entries");
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < block.cols(); ++j) {
      if (std::fabs(block(i, j) - block(j, i)) > kHermitianTolerance) {
        throw ValidationError("term block is not Hermitian at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
    }
  }
}

Eigen::MatrixXd pauli_x() {
  Eigen::MatrixXd x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

Eigen::MatrixXd pauli_zz() {
  return Eigen::Vector4d(1, -1, -1, 1).asDiagonal();
}

}  // namespace

LocalTerm::LocalTerm(std::vector<int> support, Eigen::MatrixXd block)
    : support_(std::move(support)), block_(std::move(block)) {
  if (support_.empty()) throw ValidationError("term support is empty");
  if (arity() > kMaxLocality) {
    throw SizeError("term support has " + std::to_string(arity()) + " qubits, limit is " +
                    std::to_string(kMaxLocality));
  }
  std::set<int> seen;
  for (int q : support_) {
    if (q < 0 || q >= kMaxQubits) throw ValidationError("term qubit index " + std::to_string(q) + " out of range");
    if (!seen.insert(q).second) throw ValidationError("term support repeats qubit " + std::to_string(q));
  }
  const Eigen::Index dim = Eigen::Index{1} << arity();
  if (block_.rows() != dim || block_.cols() != dim) {
    throw ValidationError("term block must be " + std::to_string(dim) + "x" + std::to_string(dim) +
                          " for a support of " + std::to_string(arity()) + " qubits");
  }
  require_symmetric(block_);
}

int LocalTerm::local_index(Basis x) const {
  int local = 0;
  for (int q : support_) local = (local << 1) | bit_of(x, q);
  return local;
}

Basis LocalTerm::embed(Basis x, int local) const {
  const int m = arity();
  for (int j = 0; j < m; ++j) {
    const Basis mask = Basis{1} << support_[static_cast<std::size_t>(j)];
    if ((local >> (m - 1 - j)) & 1) {
      x |= mask;
    } else {
      x &= ~mask;
    }
  }
  return x;
}

double LocalTerm::norm() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stoquastic(const Eigen::MatrixXd& block) {
  require_symmetric(block);
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      if (i != j && block(i, j) > kStoquasticTolerance) return false;
    }
  }
  return true;
}

bool is_stoquastic(const LocalTerm& term) { return is_stoquastic(term.block()); }

StoquasticHamiltonian::StoquasticHamiltonian(int n, std::vector<LocalTerm> terms)
    : n_(n), terms_(std::move(terms)) {
  if (n_ < 1 || n_ > kMaxQubits) {
    throw SizeError("qubit count " + std::to_string(n_) + " outside [1, " + std::to_string(kMaxQubits) + "]");
  }
  if (terms_.empty()) throw ValidationError("Hamiltonian has no terms");
  for (std::size_t a = 0; a < terms_.size(); ++a) {
    const auto& term = terms_[a];
    for (int q : term.support()) {
      if (q >= n_) {
        throw ValidationError("terms[" + std::to_string(a) + "] acts on qubit " + std::to_string(q) +
                              " but n = " + std::to_string(n_));
      }
    }
    if (!is_stoquastic(term)) {
      throw NotStoquasticError("terms[" + std::to_string(a) + "] has a positive off-diagonal entry");
    }
    locality_ = std::max(locality_, term.arity());
  }
}

double StoquasticHamiltonian::diagonal(Basis x) const {
  double d = 0.0;
  for (const auto& term : terms_) {
    const int l = term.local_index(x);
    d += term.block()(l, l);
  }
  return d;
}

double StoquasticHamiltonian::total_norm() const {
  double j = 0.0;
  for (const auto& term : terms_) j += term.norm();
  return j;
}

TimModel::TimModel(int n, std::vector<Coupling> couplings, std::vector<double> fields)
    : n_(n), couplings_(std::move(couplings)), fields_(std::move(fields)) {
  if (n_ < 1 || n_ > kMaxQubits) throw SizeError("TIM qubit count " + std::to_string(n_) + " out of range");
  if (static_cast<int>(fields_.size()) != n_) {
    throw ValidationError("fields has " + std::to_string(fields_.size()) + " entries, expected n = " +
                          std::to_string(n_));
  }
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < couplings_.size(); ++i) {
    const auto& c = couplings_[i];
    if (!(0 <= c.u && c.u < c.v && c.v < n_)) {
      throw ValidationError("couplings[" + std::to_string(i) + "] needs 0 <= u < v < n");
    }
    if (!std::isfinite(c.strength)) throw ValidationError("couplings[" + std::to_string(i) + "] is not finite");
    if (!seen.emplace(c.u, c.v).second) {
      throw ValidationError("couplings[" + std::to_string(i) + "] duplicates pair (" + std::to_string(c.u) +
                            "," + std::to_string(c.v) + ")");
    }
  }
  for (std::size_t u = 0; u < fields_.size(); ++u) {
    if (!std::isfinite(fields_[u])) throw ValidationError("fields[" + std::to_string(u) + "] is not finite");
  }
}

bool TimModel::is_ferromagnetic() const {
  return std::all_of(couplings_.begin(), couplings_.end(), [](const Coupling& c) { return c.strength >= 0.0; });
}

bool TimModel::is_stoquastic() const {
  return std::all_of(fields_.begin(), fields_.end(), [](double h) { return h >= 0.0; });
}

double TimModel::max_interaction() const {
  double j = 0.0;
  for (const auto& c : couplings_) j = std::max(j, c.strength);
  for (double h : fields_) j = std::max(j, std::fabs(h));
  return j;
}

StoquasticHamiltonian tim_to_local(const TimModel& tim) {
  std::vector<LocalTerm> terms;
  for (const auto& c : tim.couplings()) {
    if (c.strength == 0.0) continue;
    terms.emplace_back(std::vector<int>{c.u, c.v}, Eigen::MatrixXd(-c.strength * pauli_zz()));
  }
  for (int u = 0; u < tim.qubits(); ++u) {
    const double h = tim.fields()[static_cast<std::size_t>(u)];
    if (h < 0.0) {
      throw NotStoquasticError("fields[" + std::to_string(u) +
                               "] is negative; apply gauge_to_stoquastic first");
    }
    if (h == 0.0) continue;
    terms.emplace_back(std::vector<int>{u}, Eigen::MatrixXd(-h * pauli_x()));
  }
  return StoquasticHamiltonian(tim.qubits(), std::move(terms));
}

TimModel gauge_flip_fields(const TimModel& tim, std::span<const int> qubits) {
  std::vector<double> fields = tim.fields();
  for (int u : qubits) {
    if (u < 0 || u >= tim.qubits()) throw ValidationError("gauge flip qubit " + std::to_string(u) + " out of range");
    fields[static_cast<std::size_t>(u)] = -fields[static_cast<std::size_t>(u)];
  }
  return TimModel(tim.qubits(), tim.couplings(), std::move(fields));
}

GaugedTim gauge_to_stoquastic(const TimModel& tim) {
  std::vector<int> flipped;
  for (int u = 0; u < tim.qubits(); ++u) {
    if (tim.fields()[static_cast<std::size_t>(u)] < 0.0) flipped.push_back(u);
  }
  return {gauge_flip_fields(tim, flipped), flipped};
}

ProblemInstance::ProblemInstance(StoquasticHamiltonian h, double yes, double no)
    : hamiltonian(std::move(h)), lambda_yes(yes), lambda_no(no) {
  if (!std::isfinite(lambda_yes) || !std::isfinite(lambda_no)) {
    throw ValidationError("lambda_yes and lambda_no must be finite");
  }
  if (!(lambda_yes < lambda_no)) {
    throw ValidationError("lambda_yes must be strictly below lambda_no");
  }
}

double green_beta(const StoquasticHamiltonian& h) {
  const double j = h.total_norm();
  if (j <= 0.0) throw DegenerateInstanceError("total term norm J is zero");
  return 0.5 / j;
}

ProtocolParams protocol_params(const ProblemInstance& instance) {
  ProtocolParams p;
  p.total_norm = instance.hamiltonian.total_norm();
  if (p.total_norm <= 0.0) throw DegenerateInstanceError("total term norm J is zero");
  p.beta = 0.5 / p.total_norm;
  p.decision_gap = p.beta * (instance.lambda_no - instance.lambda_yes);
  p.trivial = !(-p.total_norm <= instance.lambda_yes && instance.lambda_no <= p.total_norm);
  return p;
}

bool witness_energy_in_range(const ProblemInstance& instance, const ProtocolParams& params,
                             double lambda_m) {
  // J is a sum of computed spectral norms; allow for its rounding at the lower end.
  const double slack = 1e-9 * std::max(1.0, params.total_norm);
  return std::isfinite(lambda_m) && -params.total_norm - slack <= lambda_m && lambda_m <= instance.lambda_yes;
}

}  // namespace stoqmc
