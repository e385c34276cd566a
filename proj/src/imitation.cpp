#include "col/imitation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "col/oracles.hpp"

namespace col {

void TabularMDP::validate() const {
  if (S < 1 || A < 1 || H < 1) throw InvalidArgument("MDP needs S, A, H >= 1");
  if (P.rows() != static_cast<Index>(S) * A || P.cols() != S) {
    throw DimensionMismatch("MDP transition matrix must be (S*A) x S");
  }
  if (initial.size() != S) throw DimensionMismatch("MDP initial distribution must have S entries");
  if (!P.allFinite() || (P.array() < 0.0).any()) throw InvalidArgument("MDP transitions must be >= 0");
  for (Index r = 0; r < P.rows(); ++r) {
    if (std::abs(P.row(r).sum() - 1.0) > 1e-12) {
      throw InvalidArgument("MDP row " + std::to_string(r) + " does not sum to 1");
    }
  }
  if (!initial.allFinite() || (initial.array() < 0.0).any() || std::abs(initial.sum() - 1.0) > 1e-12) {
    throw InvalidArgument("MDP initial distribution is not a distribution");
  }
}

namespace {

std::vector<std::vector<double>> numeric_lines(std::istream& is) {
  std::vector<std::vector<double>> out;
  std::string line;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (!ss.eof()) throw InvalidArgument("MDP file: unparsable line '" + line + "'");
    out.push_back(std::move(vals));
  }
  return out;
}

}  // namespace

TabularMDP TabularMDP::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open MDP file '" + path + "'");
  const auto lines = numeric_lines(is);
  if (lines.empty() || lines[0].size() != 3) throw InvalidArgument("MDP file: header must be `S A H`");
  TabularMDP m;
  m.S = static_cast<int>(lines[0][0]);
  m.A = static_cast<int>(lines[0][1]);
  m.H = static_cast<int>(lines[0][2]);
  if (m.S < 1 || m.A < 1 || m.H < 1) throw InvalidArgument("MDP file: S, A, H must be >= 1");
  const std::size_t rows = static_cast<std::size_t>(m.S) * m.A;
  if (lines.size() != 1 + rows && lines.size() != 2 + rows) {
    throw InvalidArgument("MDP file: expected " + std::to_string(rows) +
                          " transition rows and an optional initial distribution");
  }
  m.P.resize(static_cast<Index>(rows), m.S);
  for (std::size_t r = 0; r < rows; ++r) {
    if (lines[1 + r].size() != static_cast<std::size_t>(m.S)) {
      throw InvalidArgument("MDP file: transition row " + std::to_string(r) + " needs S entries");
    }
    for (int j = 0; j < m.S; ++j) m.P(static_cast<Index>(r), j) = lines[1 + r][j];
  }
  if (lines.size() == 2 + rows) {
    const auto& init = lines.back();
    if (init.size() != static_cast<std::size_t>(m.S)) {
      throw InvalidArgument("MDP file: initial distribution needs S entries");
    }
    m.initial = Eigen::Map<const Vector>(init.data(), m.S);
  } else {
    m.initial = Vector::Constant(m.S, 1.0 / m.S);
  }
  m.validate();
  return m;
}

void TabularMDP::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os.precision(17);
  os << S << ' ' << A << ' ' << H << '\n';
  for (Index r = 0; r < P.rows(); ++r) {
    for (Index j = 0; j < P.cols(); ++j) os << (j ? " " : "") << P(r, j);
    os << '\n';
  }
  for (Index j = 0; j < initial.size(); ++j) os << (j ? " " : "") << initial[j];
  os << '\n';
}

namespace {

Vector dirichlet_row(Index k, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vector v(k);
  for (Index i = 0; i < k; ++i) v[i] = expo(rng);
  return v / v.sum();
}

}  // namespace

TabularMDP random_mdp(int S, int A, int H, std::uint64_t seed) {
  if (S < 1 || A < 1 || H < 1) throw InvalidArgument("random_mdp: S, A, H must be >= 1");
  Rng rng(seed);
  TabularMDP m;
  m.S = S;
  m.A = A;
  m.H = H;
  m.P.resize(static_cast<Index>(S) * A, S);
  for (Index r = 0; r < m.P.rows(); ++r) {
    m.P.row(r) = dirichlet_row(S, rng).transpose();
    m.P.row(r) /= m.P.row(r).sum();
  }
  m.initial = dirichlet_row(S, rng);
  m.initial /= m.initial.sum();
  return m;
}

PolicyMatrix random_policy(int S, int A, std::uint64_t seed) {
  Rng rng(seed);
  PolicyMatrix pi(S, A);
  for (int s = 0; s < S; ++s) pi.row(s) = dirichlet_row(A, rng).transpose();
  return pi;
}

void validate_policy(const PolicyMatrix& pi, int S, int A) {
  if (pi.rows() != S || pi.cols() != A) throw DimensionMismatch("policy must be S x A");
  if (!pi.allFinite() || (pi.array() < 0.0).any()) throw InvalidArgument("policy entries must be >= 0");
  for (int s = 0; s < S; ++s) {
    if (std::abs(pi.row(s).sum() - 1.0) > 1e-12) {
      throw InvalidArgument("policy row " + std::to_string(s) + " does not sum to 1");
    }
  }
}

std::vector<Vector> per_step_distributions(const TabularMDP& mdp, const PolicyMatrix& pi) {
  std::vector<Vector> d;
  d.reserve(mdp.H);
  Vector cur = mdp.initial;
  for (int t = 0; t < mdp.H; ++t) {
    d.push_back(cur);
    if (t + 1 == mdp.H) break;
    Vector next = Vector::Zero(mdp.S);
    for (int s = 0; s < mdp.S; ++s) {
      for (int a = 0; a < mdp.A; ++a) {
        const double w = cur[s] * pi(s, a);
        if (w != 0.0) next += w * mdp.P.row(static_cast<Index>(s) * mdp.A + a).transpose();
      }
    }
    cur = next;
  }
  return d;
}

Vector state_distribution(const TabularMDP& mdp, const PolicyMatrix& pi) {
  Vector avg = Vector::Zero(mdp.S);
  for (const auto& d : per_step_distributions(mdp, pi)) avg += d;
  return avg / static_cast<double>(mdp.H);
}

ILLayout ILLayout::make(int S, int A, const std::vector<int>& groups) {
  ILLayout L;
  L.S = S;
  L.A = A;
  if (groups.empty()) {
    for (int s = 0; s < S; ++s) L.group_of.push_back(s);
  } else {
    if (static_cast<int>(groups.size()) != S) throw DimensionMismatch("IL groups need one entry per state");
    L.group_of = groups;
  }
  int G = 0;
  for (int g : L.group_of) {
    if (g < 0) throw InvalidArgument("IL group ids must be >= 0");
    G = std::max(G, g + 1);
  }
  L.G = G;
  L.members.assign(G, {});
  for (int s = 0; s < S; ++s) L.members[L.group_of[s]].push_back(s);
  for (int g = 0; g < G; ++g) {
    if (L.members[g].empty()) throw InvalidArgument("IL group " + std::to_string(g) + " is empty");
  }
  return L;
}

PolicyMatrix ILLayout::policy(const Vector& theta) const {
  PolicyMatrix pi(S, A);
  for (int s = 0; s < S; ++s) pi.row(s) = theta.segment(static_cast<Index>(group_of[s]) * A, A).transpose();
  return pi;
}

Vector ILLayout::params(const PolicyMatrix& pi) const {
  Vector theta = Vector::Zero(static_cast<Index>(G) * A);
  for (int g = 0; g < G; ++g) {
    for (int s : members[g]) theta.segment(static_cast<Index>(g) * A, A) += pi.row(s).transpose();
    theta.segment(static_cast<Index>(g) * A, A) /= static_cast<double>(members[g].size());
  }
  return theta;
}

namespace {

struct ILData {
  TabularMDP mdp;
  PolicyMatrix expert;
  ILLayout layout;
  double mu;

  // Per-state weights d^{pi_q}(s) + mu/|g(s)|.
  Vector weights(const Vector& query) const {
    Vector w = state_distribution(mdp, layout.policy(query));
    for (int s = 0; s < mdp.S; ++s) w[s] += mu / static_cast<double>(layout.members[layout.group_of[s]].size());
    return w;
  }
  Vector expert_row(int s) const { return expert.row(s).transpose(); }
};

class ILCumulative : public CumulativeLoss {
 public:
  ILCumulative(std::shared_ptr<const ILData> data, DecisionSet set)
      : data_(std::move(data)), set_(std::move(set)) {
    const auto& L = data_->layout;
    W_ = Vector::Zero(L.G);
    M_ = Vector::Zero(static_cast<Index>(L.G) * L.A);
    T_ = Vector::Zero(M_.size());
  }
  void add(const Vector& query, const Vector& tilt, double w) override {
    const auto& L = data_->layout;
    const Vector ws = data_->weights(query);
    for (int s = 0; s < L.S; ++s) {
      const int g = L.group_of[s];
      const Vector e = data_->expert_row(s);
      W_[g] += w * ws[s];
      M_.segment(static_cast<Index>(g) * L.A, L.A) += w * ws[s] * e;
      C_ += w * ws[s] * e.squaredNorm();
    }
    if (tilt.size() != 0) T_ += w * tilt;
  }
  double value(const Vector& x) const override {
    const auto& L = data_->layout;
    double v = 0.5 * C_ + T_.dot(x);
    for (int g = 0; g < L.G; ++g) {
      const auto xg = x.segment(static_cast<Index>(g) * L.A, L.A);
      v += 0.5 * W_[g] * xg.squaredNorm() - xg.dot(M_.segment(static_cast<Index>(g) * L.A, L.A));
    }
    return v;
  }
  Vector minimizer() const override {
    const auto& L = data_->layout;
    Vector out(M_.size());
    for (int g = 0; g < L.G; ++g) {
      const Index o = static_cast<Index>(g) * L.A;
      const Vector lin = M_.segment(o, L.A) - T_.segment(o, L.A);
      if (W_[g] > 0.0) {
        out.segment(o, L.A) = detail::project_simplex<double>(Vector(lin / W_[g]));
      } else {
        out.segment(o, L.A) = linear_minimizer(DecisionSet::simplex(L.A), Vector(-lin));
      }
    }
    return out;
  }

 private:
  std::shared_ptr<const ILData> data_;
  DecisionSet set_;
  Vector W_, M_, T_;
  double C_ = 0.0;
};

}  // namespace

Bifunction make_il_problem(const TabularMDP& mdp, const PolicyMatrix& expert, const ILOptions& opt) {
  mdp.validate();
  validate_policy(expert, mdp.S, mdp.A);
  if (mdp.A < 2) throw InvalidArgument("imitation needs at least 2 actions");
  if (!(opt.mu >= 0.0) || !std::isfinite(opt.mu)) throw InvalidArgument("imitation: mu must be >= 0");
  if (!(opt.beta_inflation >= 1.0)) throw InvalidArgument("imitation: beta inflation must be >= 1");

  auto data = std::make_shared<ILData>(ILData{mdp, expert, ILLayout::make(mdp.S, mdp.A, opt.groups), opt.mu});
  const ILLayout& L = data->layout;
  std::vector<DecisionSet> factors(L.G, DecisionSet::simplex(L.A));
  const DecisionSet set = DecisionSet::product(factors);

  Bifunction f;
  f.name = "imitation";
  f.set = set;
  f.eval = [data](const Vector& q, const Vector& x) {
    const auto& L = data->layout;
    const Vector w = data->weights(q);
    double v = 0.0;
    for (int s = 0; s < L.S; ++s) {
      const auto xg = x.segment(static_cast<Index>(L.group_of[s]) * L.A, L.A);
      v += 0.5 * w[s] * (xg - data->expert_row(s)).squaredNorm();
    }
    return v;
  };
  f.grad = [data](const Vector& q, const Vector& x) -> Vector {
    const auto& L = data->layout;
    const Vector w = data->weights(q);
    Vector g = Vector::Zero(x.size());
    for (int s = 0; s < L.S; ++s) {
      const Index o = static_cast<Index>(L.group_of[s]) * L.A;
      g.segment(o, L.A) += w[s] * (x.segment(o, L.A) - data->expert_row(s));
    }
    return g;
  };
  f.best_response = [data, set](const Vector& q, const Vector& t) -> Vector {
    ILCumulative acc(data, set);
    acc.add(q, t, 1.0);
    return acc.minimizer();
  };
  f.cumulative = [data, set]() -> std::unique_ptr<CumulativeLoss> {
    return std::make_unique<ILCumulative>(data, set);
  };
  f.sample_grad = [data](const Vector& q, const Vector& x, Rng& rng) -> Vector {
    const auto& L = data->layout;
    const auto& m = data->mdp;
    const auto steps = per_step_distributions(m, L.policy(q));
    Vector g = Vector::Zero(x.size());
    for (int s = 0; s < L.S; ++s) {
      const Index o = static_cast<Index>(L.group_of[s]) * L.A;
      const double reg = data->mu / static_cast<double>(L.members[L.group_of[s]].size());
      g.segment(o, L.A) += reg * (x.segment(o, L.A) - data->expert_row(s));
    }
    for (const auto& d : steps) {
      std::discrete_distribution<int> pick(d.data(), d.data() + d.size());
      const int s = pick(rng);
      const Index o = static_cast<Index>(L.group_of[s]) * L.A;
      g.segment(o, L.A) += (x.segment(o, L.A) - data->expert_row(s)) / static_cast<double>(m.H);
    }
    return g;
  };

  // Every group's Hessian block is (sum_{s in g} d(s) + mu) I with sum_{s in g} d(s) in [0, 1].
  f.reg.alpha = opt.mu;
  f.reg.gamma = 1.0 + opt.mu;
  f.reg.G = std::sqrt(2.0) * (1.0 + opt.mu * L.G);
  f.reg.alpha_certified = f.reg.gamma_certified = f.reg.G_certified = true;
  f.reg.beta = opt.beta_inflation * estimate_regularity(f, opt.beta_samples, opt.beta_seed).beta;
  f.reg.beta_certified = false;
  return f;
}

ILConvergenceReport il_convergence_check(const Bifunction& f, double eta, long N,
                                         const Vector& initial, double tol) {
  const auto& r = f.reg;
  if (!(r.alpha > r.beta)) {
    throw InvalidArgument("il_convergence_check: needs alpha > beta (alpha = " +
                          std::to_string(r.alpha) + ", beta = " + std::to_string(r.beta) + ")");
  }
  if (!(eta > 0.0)) throw InvalidArgument("il_convergence_check: eta must be > 0");
  ILConvergenceReport rep;
  rep.eta = eta;
  const double q = (r.alpha - r.beta) / (r.gamma + r.beta);
  rep.bound = 1.0 - q * q;
  rep.pi_hat = find_equilibrium(f, 1e-13).x_star;
  Vector x = project(f.set, initial);
  for (long n = 1; n <= N; ++n) {
    const Vector next = project(f.set, Vector(x - eta * f.grad(x, x)));
    const double den = (x - rep.pi_hat).squaredNorm();
    if (den > 1e-12) {
      const double ratio = (next - rep.pi_hat).squaredNorm() / den;
      rep.ratios.push_back(ratio);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (ratio > rep.bound + tol) rep.holds = false;
    }
    x = next;
  }
  return rep;
}

}  // namespace col
