#include "mclab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace mclab {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Strongly connected components of the positive-entry digraph.
/// Iterative Tarjan; comp ids are 0..count-1 in reverse topological order.
struct SccResult {
  int count = 0;
  std::vector<int> comp;
};

SccResult strongly_connected_components(const MatrixXd& q) {
  const int s = static_cast<int>(q.rows());
  SccResult out;
  out.comp.assign(s, -1);
  std::vector<int> index(s, -1), low(s, 0), on_stack(s, 0);
  std::vector<int> stack;
  stack.reserve(s);
  int next_index = 0;

  struct Frame {
    int v;
    int child;
  };
  std::vector<Frame> call;
  for (int root = 0; root < s; ++root) {
    if (index[root] != -1) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      Frame& fr = call.back();
      const int v = fr.v;
      if (fr.child == 0) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (fr.child < s) {
        const int w = fr.child++;
        if (q(v, w) <= 0.0) continue;
        if (index[w] == -1) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        while (true) {
          const int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          out.comp[w] = out.count;
          if (w == v) break;
        }
        ++out.count;
      }
      call.pop_back();
      if (!call.empty()) {
        const int parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return out;
}

/// Period of one strongly connected component: gcd of d(u)+1-d(v) over its
/// internal edges, with d a BFS labelling from any member. 0 for components
/// without internal edges.
int component_period(const MatrixXd& q, const std::vector<int>& comp, int comp_id) {
  const int s = static_cast<int>(q.rows());
  int root = -1;
  for (int v = 0; v < s; ++v) {
    if (comp[v] == comp_id) {
      root = v;
      break;
    }
  }
  std::vector<long> dist(s, -1);
  std::vector<int> queue;
  queue.push_back(root);
  dist[root] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    for (int w = 0; w < s; ++w) {
      if (q(v, w) <= 0.0 || comp[w] != comp_id) continue;
      if (dist[w] == -1) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  long g = 0;
  for (int v = 0; v < s; ++v) {
    if (comp[v] != comp_id || dist[v] == -1) continue;
    for (int w = 0; w < s; ++w) {
      if (q(v, w) <= 0.0 || comp[w] != comp_id) continue;
      g = std::gcd(g, std::abs(dist[v] + 1 - dist[w]));
    }
  }
  return static_cast<int>(g);
}

void validate_kernel(const MatrixXd& kernel, const Tolerances& tol) {
  const int s = static_cast<int>(kernel.rows());
  if (s < 1 || kernel.cols() != kernel.rows()) {
    throw NonStochasticKernel("kernel must be a square matrix with at least one state");
  }
  for (int x = 0; x < s; ++x) {
    double row_sum = 0.0;
    for (int y = 0; y < s; ++y) {
      const double v = kernel(x, y);
      if (!std::isfinite(v)) {
        throw NonStochasticKernel("kernel row " + std::to_string(x) + " has a non-finite entry");
      }
      if (v < -tol.stochastic || v > 1.0 + tol.stochastic) {
        throw NonStochasticKernel("kernel entry (" + std::to_string(x) + "," + std::to_string(y) +
                                  ") = " + std::to_string(v) + " outside [0,1]");
      }
      row_sum += v;
    }
    if (std::abs(row_sum - 1.0) > tol.stochastic) {
      std::ostringstream os;
      os << "kernel row " << x << " sums to " << row_sum << ", not 1";
      throw NonStochasticKernel(os.str());
    }
  }
}

VectorXd direct_stationary(const MatrixXd& kernel) {
  const int s = static_cast<int>(kernel.rows());
  // Left fixed vector: replace one equation of (Q^T - I) pi = 0 with sum = 1.
  MatrixXd a = kernel.transpose();
  a.diagonal().array() -= 1.0;
  a.row(0).setOnes();
  VectorXd b = VectorXd::Zero(s);
  b(0) = 1.0;
  return a.partialPivLu().solve(b);
}

VectorXd power_iteration_stationary(const MatrixXd& kernel) {
  const int s = static_cast<int>(kernel.rows());
  // Lazy-chain iteration (I + Q)/2 shares the fixed vector and is aperiodic,
  // so plain iteration converges even for periodic kernels.
  VectorXd x = VectorXd::Constant(s, 1.0 / s);
  for (int it = 0; it < 200000; ++it) {
    VectorXd next = 0.5 * (x + kernel.transpose() * x);
    next /= next.sum();
    const double delta = (next - x).lpNorm<1>();
    x = next;
    if (delta < 1e-15) break;
  }
  return x;
}

}  // namespace

Eigen::VectorXd stationary_law(const Eigen::MatrixXd& kernel, const Tolerances& tol) {
  const int s = static_cast<int>(kernel.rows());
  VectorXd pi = s <= tol.stationary_direct_max ? direct_stationary(kernel)
                                               : power_iteration_stationary(kernel);
  const double residual = (pi.transpose() * kernel - pi.transpose()).cwiseAbs().maxCoeff();
  if (!pi.allFinite() || residual > tol.fixed_point) {
    throw NoUniqueStationaryLaw("stationary solve failed (residual " + std::to_string(residual) +
                                ")");
  }
  pi /= pi.sum();
  return pi;
}

ChainModel build_chain(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& observable,
                       std::optional<Eigen::VectorXd> stationary, std::vector<std::string> states,
                       const Tolerances& tol) {
  validate_kernel(kernel, tol);
  const int s = static_cast<int>(kernel.rows());
  if (observable.size() != s) {
    throw LengthMismatch("observable has length " + std::to_string(observable.size()) +
                         ", kernel has " + std::to_string(s) + " states");
  }
  if (!observable.allFinite()) throw Error("observable has a non-finite entry");

  VectorXd pi;
  if (stationary.has_value()) {
    pi = *stationary;
    if (pi.size() != s) throw LengthMismatch("stationary vector length mismatch");
    if (!pi.allFinite() || pi.minCoeff() < 0.0) {
      throw InvalidStationaryLaw("stationary entries must be finite and nonnegative");
    }
    if (std::abs(pi.sum() - 1.0) > tol.fixed_point) {
      throw InvalidStationaryLaw("stationary vector sums to " + std::to_string(pi.sum()));
    }
    const double residual = (pi.transpose() * kernel - pi.transpose()).cwiseAbs().maxCoeff();
    if (residual > tol.fixed_point) {
      throw InvalidStationaryLaw("supplied vector is not fixed by the kernel (residual " +
                                 std::to_string(residual) + ")");
    }
    pi /= pi.sum();
  } else {
    // A unique full-support law requires a single closed class covering
    // every state, i.e. irreducibility.
    const SccResult scc = strongly_connected_components(kernel);
    if (scc.count > 1) {
      std::vector<char> closed(scc.count, 1);
      for (int x = 0; x < s; ++x) {
        for (int y = 0; y < s; ++y) {
          if (kernel(x, y) > 0.0 && scc.comp[x] != scc.comp[y]) closed[scc.comp[x]] = 0;
        }
      }
      const int n_closed = static_cast<int>(std::count(closed.begin(), closed.end(), 1));
      if (n_closed != 1) {
        throw NoUniqueStationaryLaw("kernel has " + std::to_string(n_closed) +
                                    " closed classes; supply a stationary law");
      }
      throw ZeroMassState(
          "kernel has transient states (zero stationary mass); restrict the state set");
    }
    pi = stationary_law(kernel, tol);
  }

  for (int x = 0; x < s; ++x) {
    if (pi(x) <= 0.0) {
      throw ZeroMassState("state " + std::to_string(x) + " has zero stationary mass");
    }
  }

  ChainModel model;
  model.kernel = kernel;
  model.stationary = pi;
  model.tol = tol;
  const double mean = pi.dot(observable);
  model.observable = observable.array() - mean;
  model.recenter_shift = mean;
  if (states.empty()) {
    for (int x = 0; x < s; ++x) states.push_back("s" + std::to_string(x));
  } else if (static_cast<int>(states.size()) != s) {
    throw LengthMismatch("state label count does not match kernel size");
  }
  model.states = std::move(states);
  return model;
}

Eigen::MatrixXd adjoint(const ChainModel& chain) {
  const int s = chain.size();
  MatrixXd qs(s, s);
  for (int x = 0; x < s; ++x) {
    for (int y = 0; y < s; ++y) {
      qs(x, y) = chain.stationary(y) * chain.kernel(y, x) / chain.stationary(x);
    }
  }
  return qs;
}

ChainModel adjoint_chain(const ChainModel& chain) {
  ChainModel rev = chain;
  rev.kernel = adjoint(chain);
  return rev;
}

double pi_inner(const ChainModel& chain, const Eigen::VectorXd& g, const Eigen::VectorXd& h) {
  if (g.size() != chain.size() || h.size() != chain.size()) {
    throw LengthMismatch("pi_inner arguments must have one entry per state");
  }
  double acc = 0.0;
  for (int x = 0; x < chain.size(); ++x) acc += chain.stationary(x) * g(x) * h(x);
  return acc;
}

double pi_norm(const ChainModel& chain, const Eigen::VectorXd& g) {
  const double sq = pi_inner(chain, g, g);
  return std::sqrt(sq < 0.0 ? 0.0 : sq);  // clamps rounding, propagates NaN
}

ChainClassification classify(const ChainModel& chain) {
  const int s = chain.size();
  ChainClassification c;

  double rev_defect = 0.0;
  for (int x = 0; x < s; ++x) {
    for (int y = 0; y < s; ++y) {
      rev_defect = std::max(rev_defect, std::abs(chain.stationary(x) * chain.kernel(x, y) -
                                                 chain.stationary(y) * chain.kernel(y, x)));
    }
  }
  c.reversible = rev_defect <= chain.tol.normal;

  // Similarity D^{1/2} Q D^{-1/2} turns the pi-weighted geometry Euclidean;
  // the defect is the Frobenius norm of the commutator of the image with its
  // transpose.
  const VectorXd sqrt_pi = chain.stationary.array().sqrt();
  MatrixXd m(s, s);
  for (int x = 0; x < s; ++x) {
    for (int y = 0; y < s; ++y) {
      m(x, y) = sqrt_pi(x) * chain.kernel(x, y) / sqrt_pi(y);
    }
  }
  c.normality_defect = (m * m.transpose() - m.transpose() * m).norm();
  c.normal = c.normality_defect <= chain.tol.normal;

  const SccResult scc = strongly_connected_components(chain.kernel);
  c.irreducible = scc.count == 1;
  c.ergodic = c.irreducible;
  bool all_aperiodic = true;
  for (int id = 0; id < scc.count; ++id) {
    const int p = component_period(chain.kernel, scc.comp, id);
    if (p > 1) all_aperiodic = false;
    if (c.irreducible) c.period = p;
  }
  c.aperiodic = all_aperiodic;
  c.totally_ergodic = c.irreducible && c.aperiodic;
  return c;
}

namespace {

using nlohmann::json;

std::vector<double> number_array(const json& node, const std::string& field) {
  if (!node.is_array()) throw SpecParseError("field '" + field + "' must be an array");
  std::vector<double> out;
  out.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) {
      throw SpecParseError("field '" + field + "' entry " + std::to_string(i) +
                           " is not a finite number");
    }
    const double v = node[i].get<double>();
    if (!std::isfinite(v)) {
      throw SpecParseError("field '" + field + "' entry " + std::to_string(i) + " is not finite");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

ChainModel parse_chain_spec(const std::string& text, const Tolerances& tol) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecParseError("chain spec must be a JSON object");
  for (const char* field : {"kernel", "observable"}) {
    if (!doc.contains(field)) throw SpecParseError(std::string("missing field '") + field + "'");
  }
  const json& kj = doc["kernel"];
  if (!kj.is_array() || kj.empty()) throw SpecParseError("field 'kernel' must be a nonempty array of rows");
  const int s = static_cast<int>(kj.size());
  MatrixXd kernel(s, s);
  for (int x = 0; x < s; ++x) {
    const std::vector<double> row = number_array(kj[x], "kernel row " + std::to_string(x));
    if (static_cast<int>(row.size()) != s) {
      throw SpecParseError("field 'kernel' row " + std::to_string(x) + " has " +
                           std::to_string(row.size()) + " entries, expected " + std::to_string(s));
    }
    for (int y = 0; y < s; ++y) kernel(x, y) = row[y];
  }
  const std::vector<double> fv = number_array(doc["observable"], "observable");
  if (static_cast<int>(fv.size()) != s) {
    throw SpecParseError("field 'observable' has " + std::to_string(fv.size()) +
                         " entries, expected " + std::to_string(s));
  }
  VectorXd f = Eigen::Map<const VectorXd>(fv.data(), s);

  std::optional<VectorXd> pi;
  if (doc.contains("stationary") && !doc["stationary"].is_null()) {
    const std::vector<double> pv = number_array(doc["stationary"], "stationary");
    if (static_cast<int>(pv.size()) != s) {
      throw SpecParseError("field 'stationary' has " + std::to_string(pv.size()) +
                           " entries, expected " + std::to_string(s));
    }
    pi = Eigen::Map<const VectorXd>(pv.data(), s);
  }

  std::vector<std::string> states;
  if (doc.contains("states") && !doc["states"].is_null()) {
    if (!doc["states"].is_array() || static_cast<int>(doc["states"].size()) != s) {
      throw SpecParseError("field 'states' must list one label per state");
    }
    for (const auto& item : doc["states"]) {
      if (!item.is_string()) throw SpecParseError("field 'states' entries must be strings");
      states.push_back(item.get<std::string>());
    }
  }
  return build_chain(kernel, f, pi, std::move(states), tol);
}

ChainModel load_chain_spec(const std::string& path, const Tolerances& tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecParseError("cannot open chain spec '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_chain_spec(buf.str(), tol);
}

std::string chain_spec_text(const ChainModel& chain) {
  nlohmann::ordered_json doc;
  doc["states"] = chain.states;
  auto rows = nlohmann::ordered_json::array();
  for (int x = 0; x < chain.size(); ++x) {
    auto row = nlohmann::ordered_json::array();
    for (int y = 0; y < chain.size(); ++y) row.push_back(chain.kernel(x, y));
    rows.push_back(row);
  }
  doc["kernel"] = rows;
  auto fj = nlohmann::ordered_json::array();
  auto pj = nlohmann::ordered_json::array();
  for (int x = 0; x < chain.size(); ++x) {
    fj.push_back(chain.observable(x));
    pj.push_back(chain.stationary(x));
  }
  doc["observable"] = fj;
  doc["stationary"] = pj;
  return doc.dump(2) + "\n";
}

void write_chain_spec(const ChainModel& chain, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write chain spec '" + path + "'");
  out << chain_spec_text(chain);
}

}  // namespace mclab
