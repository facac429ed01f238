#include "sp2lab/metric.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sp2lab {

std::string to_string(const Scale& s) {
  if (s.infinite) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << s.value;
  return os.str();
}

Scale parse_scale(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") return Scale::inf();
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse scale '" + text + "'");
  }
  if (pos != text.size()) throw std::invalid_argument("cannot parse scale '" + text + "'");
  if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("scale must be positive or inf");
  return Scale::of(v);
}

void MetricParams::validate() const {
  for (double nu : {nu1, nu2})
    if (!(nu > 0) || nu >= kNuMax + 1e-12)
      throw std::invalid_argument("nu1, nu2 must satisfy 0 < nu < 1/sqrt(2) (1/sqrt(2) gives the biinvariant factor)");
  for (const Scale* s : {&l1u, &l1d})
    if (!s->infinite && !(s->value > 0 && std::isfinite(s->value)))
      throw std::invalid_argument("l1u, l1d must be positive or inf");
}

double MetricEvaluator::inner(const Sp2Point& Q, const TangentVec& X, const TangentVec& Y) const {
  return gram(Q, {X, Y})(0, 1);
}

double biinvariant_inner(const TangentVec& X, const TangentVec& Y) { return 0.5 * re_dot(X, Y); }

Eigen::Matrix<double, 10, 10> split_lie_metric(double nu1, double nu2) {
  Eigen::Matrix<double, 10, 1> w;
  w << nu1 * nu1, nu1 * nu1, nu1 * nu1, nu2 * nu2, nu2 * nu2, nu2 * nu2, 1, 1, 1, 1;
  return w.asDiagonal();
}

double split_inner(double nu1, double nu2, const Sp2Point& Q, const TangentVec& X, const TangentVec& Y) {
  const LieCoords x = lie_coords(to_lie(Q, X)), y = lie_coords(to_lie(Q, Y));
  return x.dot(split_lie_metric(nu1, nu2) * y);
}

namespace {

class BiinvariantMetric final : public MetricEvaluator {
 public:
  Eigen::MatrixXd gram(const Sp2Point&, const std::vector<TangentVec>& V) const override {
    const auto n = static_cast<Eigen::Index>(V.size());
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) G(i, j) = G(j, i) = biinvariant_inner(V[i], V[j]);
    return G;
  }
  std::string describe() const override { return "biinvariant"; }
};

class SplitMetric final : public MetricEvaluator {
 public:
  SplitMetric(double nu1, double nu2) : nu1_(nu1), nu2_(nu2), M_(split_lie_metric(nu1, nu2)) {}

  Eigen::MatrixXd gram(const Sp2Point& Q, const std::vector<TangentVec>& V) const override {
    const auto n = static_cast<Eigen::Index>(V.size());
    Eigen::MatrixXd C(10, n);
    for (Eigen::Index i = 0; i < n; ++i) C.col(i) = lie_coords(to_lie(Q, V[i]));
    Eigen::MatrixXd G = C.transpose() * M_ * C;
    return 0.5 * (G + G.transpose());
  }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "split(nu1=" << nu1_ << ", nu2=" << nu2_ << ")";
    return os.str();
  }

 private:
  double nu1_, nu2_;
  Eigen::Matrix<double, 10, 10> M_;
};

class CheegerMetric final : public MetricEvaluator {
 public:
  CheegerMetric(MetricPtr base, std::vector<ActionDescriptor> actions, std::vector<double> l2)
      : base_(std::move(base)), actions_(std::move(actions)), l2_(std::move(l2)) {}

  Eigen::MatrixXd gram(const Sp2Point& Q, const std::vector<TangentVec>& V) const override {
    std::vector<TangentVec> all = killing_basis(Q, actions_);
    const auto r = static_cast<Eigen::Index>(all.size());
    const auto n = static_cast<Eigen::Index>(V.size());
    all.insert(all.end(), V.begin(), V.end());
    const Eigen::MatrixXd Gb = base_->gram(Q, all);
    Eigen::MatrixXd S = Gb.topLeftCorner(r, r);
    check_orthogonality(S);
    for (Eigen::Index i = 0; i < r; ++i) S(i, i) += l2_[static_cast<std::size_t>(i / 3)];
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) throw std::runtime_error("cheeger_deform: singular orbit system");
    const Eigen::MatrixXd A = llt.solve(Gb.topRightCorner(r, n));
    // l^2 B(a, a) + base(Z - K_a, Z - K_a) collapses to G_ZZ - G_ZK (G_KK + l^2 B)^{-1} G_KZ.
    Eigen::MatrixXd G = Gb.bottomRightCorner(n, n) - Gb.bottomLeftCorner(n, r) * A;
    return 0.5 * (G + G.transpose());
  }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "cheeger(" << base_->describe();
    for (std::size_t i = 0; i < actions_.size(); ++i) os << ", " << actions_[i].name() << " l=" << std::sqrt(l2_[i]);
    os << ")";
    return os.str();
  }

 private:
  // Orthogonal generators must give orthogonal killing fields in the base metric, factor by factor.
  static void check_orthogonality(const Eigen::MatrixXd& G) {
    for (Eigen::Index f = 0; f + 3 <= G.rows(); f += 3)
      for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = i + 1; j < 3; ++j)
          if (std::abs(G(f + i, f + j)) > 1e-9 * std::sqrt(G(f + i, f + i) * G(f + j, f + j)))
            throw std::logic_error("cheeger_deform: action does not preserve orthogonality of its generators");
  }

  MetricPtr base_;
  std::vector<ActionDescriptor> actions_;
  std::vector<double> l2_;
};

}  // namespace

MetricPtr biinvariant_metric() { return std::make_shared<BiinvariantMetric>(); }

MetricPtr split_metric(double nu1, double nu2) { return std::make_shared<SplitMetric>(nu1, nu2); }

MetricPtr cheeger_deform(MetricPtr base, const std::vector<ActionDescriptor>& actions, const std::vector<Scale>& scales) {
  if (actions.size() != scales.size()) throw std::invalid_argument("cheeger_deform: one scale per action required");
  std::vector<ActionDescriptor> acts;
  std::vector<double> l2;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (scales[i].infinite) continue;
    if (!(scales[i].value > 0)) throw std::invalid_argument("cheeger_deform: scale must be positive");
    acts.push_back(actions[i]);
    l2.push_back(scales[i].value * scales[i].value);
  }
  if (acts.empty()) return base;
  return std::make_shared<CheegerMetric>(std::move(base), std::move(acts), std::move(l2));
}

MetricPtr cheeger_deform(MetricPtr base, const ActionDescriptor& action, Scale l) {
  return cheeger_deform(std::move(base), std::vector<ActionDescriptor>{action}, std::vector<Scale>{l});
}

MetricPtr full_metric(const MetricParams& params) {
  params.validate();
  return cheeger_deform(split_metric(params.nu1, params.nu2),
                        {action_of(ActionKind::Up), action_of(ActionKind::Down)}, {params.l1u, params.l1d});
}

double nu_of_scale(Scale l) {
  if (l.infinite) return kNuMax;
  const double v = l.value;
  return kNuMax * v / std::sqrt(v * v + 0.5);
}

Scale scale_of_nu(double nu) {
  if (!(nu > 0) || nu > kNuMax + 1e-12) throw std::invalid_argument("scale_of_nu: nu must lie in (0, 1/sqrt(2)]");
  const double d = 1.0 - 2.0 * nu * nu;
  if (d <= 1e-15) return Scale::inf();
  return Scale::of(std::sqrt(nu * nu / d));
}

std::vector<TangentVec> killing_basis(const Sp2Point& Q, const std::vector<ActionDescriptor>& actions) {
  std::vector<TangentVec> K;
  K.reserve(3 * actions.size());
  for (const auto& a : actions)
    for (const auto& k : kImagUnits) K.push_back(killing_field(a, k, Q));
  return K;
}

namespace {

struct OrbitSystem {
  Eigen::VectorXd m;     // base(Z, K_i)
  Eigen::MatrixXd G;     // base(K_i, K_j)
  Eigen::VectorXd l2;    // per generator
  std::vector<TangentVec> K;
};

OrbitSystem orbit_system(const MetricEvaluator& base, const Sp2Point& Q, const TangentVec& Z,
                         const std::vector<ActionDescriptor>& actions, const std::vector<Scale>& scales) {
  if (actions.size() != scales.size()) throw std::invalid_argument("one scale per action required");
  OrbitSystem s;
  std::vector<ActionDescriptor> acts;
  std::vector<double> l2;
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (!scales[i].infinite) {
      acts.push_back(actions[i]);
      l2.push_back(scales[i].value * scales[i].value);
    }
  s.K = killing_basis(Q, acts);
  const auto r = static_cast<Eigen::Index>(s.K.size());
  std::vector<TangentVec> all = s.K;
  all.push_back(Z);
  const Eigen::MatrixXd Gb = base.gram(Q, all);
  s.G = Gb.topLeftCorner(r, r);
  s.m = Gb.col(r).head(r);
  s.l2.resize(r);
  for (Eigen::Index i = 0; i < r; ++i) s.l2[i] = l2[static_cast<std::size_t>(i / 3)];
  return s;
}

TangentVec combine(const std::vector<TangentVec>& K, const Eigen::VectorXd& a) {
  TangentVec out;
  for (std::size_t i = 0; i < K.size(); ++i) out = out + a[static_cast<Eigen::Index>(i)] * K[i];
  return out;
}

}  // namespace

CheegerLift cheeger_horizontal_correspondence(const MetricEvaluator& base, const Sp2Point& Q, const TangentVec& Z,
                                              const std::vector<ActionDescriptor>& actions,
                                              const std::vector<Scale>& scales) {
  const OrbitSystem s = orbit_system(base, Q, Z, actions, scales);
  CheegerLift lift;
  if (s.K.empty()) {
    lift.X = Z;
    return lift;
  }
  Eigen::MatrixXd S = s.G;
  S.diagonal() += s.l2;
  lift.a = S.llt().solve(s.m);
  lift.X = Z - combine(s.K, lift.a);
  lift.lambda1 = std::sqrt(s.l2[0]);
  lift.lambda2 = std::sqrt(s.G(0, 0));
  return lift;
}

TangentVec cheeger_transport(const MetricEvaluator& base, const Sp2Point& Q, const TangentVec& Z,
                             const std::vector<ActionDescriptor>& actions, const std::vector<Scale>& scales) {
  const OrbitSystem s = orbit_system(base, Q, Z, actions, scales);
  if (s.K.empty()) return Z;
  const Eigen::VectorXd a = s.m.cwiseQuotient(s.l2);
  return Z + combine(s.K, a);
}

}  // namespace sp2lab
