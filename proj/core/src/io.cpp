#include "stoqmc/io.hpp"

#include <fstream>
#include <string>
#include <vector>

#include "stoqmc/errors.hpp"

namespace stoqmc {
namespace {

const json& field(const json& j, const char* key, const std::string& where = {}) {
  if (!j.is_object()) throw ValidationError((where.empty() ? "model" : where) + ": expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError("missing field \"" + where + (where.empty() ? "" : ".") + key + "\"");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  const auto v = j.get<long long>();
  if (v < -(1LL << 30) || v > (1LL << 30)) throw RangeError(where + ": integer out of range");
  return static_cast<int>(v);
}

const json& array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  return j;
}

// Rethrows model-constructor failures with the file-level field prefixed.
template <typename F>
auto with_context(const std::string& where, F&& make) {
  try {
    return make();
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

StoquasticHamiltonian hamiltonian_from_json(const json& j) {
  const int n = integer(field(j, "n"), "n");
  const json& terms = array(field(j, "terms"), "terms");
  std::vector<LocalTerm> out;
  for (std::size_t a = 0; a < terms.size(); ++a) {
    const std::string where = "terms[" + std::to_string(a) + "]";
    const json& qubits = array(field(terms[a], "qubits", where), where + ".qubits");
    std::vector<int> support;
    for (std::size_t q = 0; q < qubits.size(); ++q) {
      support.push_back(integer(qubits[q], where + ".qubits[" + std::to_string(q) + "]"));
    }
    const json& rows = array(field(terms[a], "matrix", where), where + ".matrix");
    const auto dim = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd block(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      const std::string rw = where + ".matrix[" + std::to_string(r) + "]";
      const json& row = array(rows[static_cast<std::size_t>(r)], rw);
      if (static_cast<Eigen::Index>(row.size()) != dim) throw ValidationError(rw + ": matrix is not square");
      for (Eigen::Index c = 0; c < dim; ++c) {
        block(r, c) = number(row[static_cast<std::size_t>(c)], rw + "[" + std::to_string(c) + "]");
      }
    }
    out.push_back(with_context(where, [&] { return LocalTerm(std::move(support), std::move(block)); }));
    if (!is_stoquastic(out.back())) {
      throw NotStoquasticError(where + ".matrix has a positive off-diagonal entry");
    }
  }
  return StoquasticHamiltonian(n, std::move(out));
}

json to_json(const StoquasticHamiltonian& h) {
  json terms = json::array();
  for (const auto& t : h.terms()) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < t.block().rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < t.block().cols(); ++c) row.push_back(t.block()(r, c));
      rows.push_back(std::move(row));
    }
    terms.push_back({{"qubits", t.support()}, {"matrix", std::move(rows)}});
  }
  return {{"n", h.qubits()}, {"terms", std::move(terms)}};
}

TimModel tim_from_json(const json& j) {
  const int n = integer(field(j, "n"), "n");
  std::vector<Coupling> couplings;
  if (j.contains("couplings")) {
    const json& cs = array(j["couplings"], "couplings");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string where = "couplings[" + std::to_string(i) + "]";
      const json& c = array(cs[i], where);
      if (c.size() != 3) throw ValidationError(where + ": expected [u, v, J]");
      couplings.push_back({integer(c[0], where + "[0]"), integer(c[1], where + "[1]"), number(c[2], where + "[2]")});
    }
  }
  const json& fs = array(field(j, "fields"), "fields");
  std::vector<double> fields;
  for (std::size_t u = 0; u < fs.size(); ++u) fields.push_back(number(fs[u], "fields[" + std::to_string(u) + "]"));
  return TimModel(n, std::move(couplings), std::move(fields));
}

json to_json(const TimModel& tim) {
  json cs = json::array();
  for (const auto& c : tim.couplings()) cs.push_back({c.u, c.v, c.strength});
  return {{"n", tim.qubits()}, {"couplings", std::move(cs)}, {"fields", tim.fields()}};
}

ClassicalIsingModel ising_from_json(const json& j) {
  const int n = integer(field(j, "N"), "N");
  std::vector<Edge> edges;
  const json& es = array(field(j, "edges"), "edges");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const json& e = array(es[i], where);
    if (e.size() != 3) throw ValidationError(where + ": expected [i, j, w]");
    edges.push_back({integer(e[0], where + "[0]"), integer(e[1], where + "[1]"), number(e[2], where + "[2]")});
  }
  const double log_prefactor = j.contains("log_prefactor") ? number(j["log_prefactor"], "log_prefactor") : 0.0;
  return ClassicalIsingModel(n, std::move(edges), log_prefactor);
}

json to_json(const ClassicalIsingModel& model) {
  json es = json::array();
  for (const auto& e : model.edges()) es.push_back({e.i, e.j, e.w});
  return {{"N", model.spins()}, {"edges", std::move(es)}, {"log_prefactor", model.log_prefactor()}};
}

ModelFormat detect_format(const json& j) {
  if (!j.is_object()) throw ValidationError("model: expected a JSON object");
  if (j.contains("terms")) return ModelFormat::hamiltonian;
  if (j.contains("fields")) return ModelFormat::tim;
  if (j.contains("edges")) return ModelFormat::ising;
  throw ValidationError("model: expected one of the fields \"terms\", \"fields\" or \"edges\"");
}

StoquasticHamiltonian any_hamiltonian_from_json(const json& j) {
  switch (detect_format(j)) {
    case ModelFormat::hamiltonian: return hamiltonian_from_json(j);
    case ModelFormat::tim: return tim_to_local(tim_from_json(j));
    case ModelFormat::ising: break;
  }
  throw ValidationError("model: a classical Ising file is not a quantum Hamiltonian");
}

}  // namespace stoqmc
