#include "quasispec/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quasispec/gauss.hpp"

namespace quasispec {
namespace {

constexpr double kEdgeTol = 1e-12;
constexpr double kSnapTol = 1e-5;

cd horner(const std::vector<cd>& c, double x) {
  cd v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

// Clenshaw for sum cos[k] cos(kx) + sum sin[k] sin((k+1)x).
cd eval_trig(const TrigSeries& t, double x) {
  const double c2 = 2.0 * std::cos(x);
  cd result = 0.0;
  if (!t.cos.empty()) {
    cd b1 = 0.0, b2 = 0.0;
    for (std::size_t k = t.cos.size(); k-- > 0;) {
      const cd b0 = t.cos[k] + c2 * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    result += b1 - 0.5 * c2 * b2;
  }
  if (!t.sin.empty()) {
    cd b1 = 0.0, b2 = 0.0;
    for (std::size_t k = t.sin.size(); k-- > 0;) {
      const cd b0 = t.sin[k] + c2 * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    result += b1 * std::sin(x);
  }
  return result;
}

// int_lo^hi exp(i alpha t) dt
cd exp_integral(cd alpha, double lo, double hi) {
  const double L = hi - lo;
  return std::exp(kI * alpha * (0.5 * (lo + hi))) * L * sinc(alpha * (0.5 * L));
}

const Rule& wide_rule() {
  static const Rule r = gauss_legendre(48);
  return r;
}

// int_a^b P(t) exp(i omega t) dt for P given by global power coefficients.
cd poly_exp_integral(const std::vector<cd>& c, double a, double b, cd omega) {
  if (c.empty() || b <= a) return 0.0;
  const int deg = static_cast<int>(c.size()) - 1;
  if (std::abs(omega) * (b - a) <= std::max(8.0, 2.0 * deg)) {
    const Rule& r = wide_rule();
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    cd sum = 0.0;
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
      const double t = mid + half * r.nodes[q];
      sum += r.weights[q] * horner(c, t) * std::exp(kI * omega * t);
    }
    return half * sum;
  }
  // Repeated integration by parts terminates for polynomials.
  const cd inv = 1.0 / (kI * omega);
  std::vector<cd> d = c;
  cd at_b = 0.0, at_a = 0.0;
  cd factor = inv;
  for (int j = 0; j <= deg; ++j) {
    at_b += factor * horner(d, b);
    at_a += factor * horner(d, a);
    // differentiate
    std::vector<cd> nd(d.size() > 1 ? d.size() - 1 : 1, 0.0);
    for (std::size_t k = 1; k < d.size(); ++k) nd[k - 1] = d[k] * double(k);
    d = std::move(nd);
    factor *= -inv;
  }
  return at_b * std::exp(kI * omega * b) - at_a * std::exp(kI * omega * a);
}

cd trig_exp_integral(const TrigSeries& t, double lo, double hi, cd omega) {
  cd sum = 0.0;
  for (std::size_t k = 0; k < t.cos.size(); ++k) {
    if (t.cos[k] == 0.0) continue;
    const double f = double(k);
    sum += 0.5 * t.cos[k] * (exp_integral(omega + f, lo, hi) + exp_integral(omega - f, lo, hi));
  }
  for (std::size_t k = 0; k < t.sin.size(); ++k) {
    if (t.sin[k] == 0.0) continue;
    const double f = double(k + 1);
    sum += t.sin[k] / (2.0 * kI) *
           (exp_integral(omega + f, lo, hi) - exp_integral(omega - f, lo, hi));
  }
  return sum;
}

bool is_real_value(cd v) { return v.imag() == 0.0; }

double snap(double x) {
  if (std::abs(x) < kSnapTol) return 0.0;
  if (std::abs(x - kPi) < kSnapTol) return kPi;
  return x;
}

}  // namespace

Potential::Potential() { build_segments(); }

Potential::Potential(std::vector<PolyPiece> pieces, std::vector<Jump> jumps,
                     TrigSeries trig)
    : pieces_(std::move(pieces)), jumps_(std::move(jumps)), trig_(std::move(trig)) {
  if (!pieces_.empty()) {
    for (auto& piece : pieces_) {
      piece.from = snap(piece.from);
      piece.to = snap(piece.to);
      if (!(piece.to > piece.from))
        throw Error(ErrorKind::Domain, "potential: piece with empty interval");
    }
    if (pieces_.front().from != 0.0 || pieces_.back().to != kPi)
      throw Error(ErrorKind::Domain, "potential: pieces must cover [0, pi]");
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      if (std::abs(pieces_[i].to - pieces_[i + 1].from) > kEdgeTol)
        throw Error(ErrorKind::Domain, "potential: pieces overlap or leave a gap");
      pieces_[i + 1].from = pieces_[i].to;
    }
  }
  for (const auto& j : jumps_)
    if (!(j.at > 0.0 && j.at < kPi))
      throw Error(ErrorKind::Domain, "potential: jump location outside (0, pi)");
  std::sort(jumps_.begin(), jumps_.end(),
            [](const Jump& a, const Jump& b) { return a.at < b.at; });

  is_real_ = true;
  for (const auto& piece : pieces_)
    for (cd c : piece.coeffs) is_real_ = is_real_ && is_real_value(c);
  for (const auto& j : jumps_) is_real_ = is_real_ && is_real_value(j.height);
  for (cd c : trig_.cos) is_real_ = is_real_ && is_real_value(c);
  for (cd c : trig_.sin) is_real_ = is_real_ && is_real_value(c);
  build_segments();
}

Potential Potential::zero() { return Potential(); }

Potential Potential::constant(cd c) { return Potential({{0.0, kPi, {c}}}, {}, {}); }

Potential Potential::linear(cd slope, cd intercept) {
  return Potential({{0.0, kPi, {intercept, slope}}}, {}, {});
}

Potential Potential::step(double at, cd height) {
  return Potential({}, {{at, height}}, {});
}

Potential Potential::cosine_series(std::vector<cd> coeffs) {
  return Potential({}, {}, {std::move(coeffs), {}});
}

void Potential::build_segments() {
  std::vector<double> cuts = breakpoints();
  cuts.insert(cuts.begin(), 0.0);
  cuts.push_back(kPi);
  segments_.clear();
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Segment s;
    s.lo = cuts[i];
    s.hi = cuts[i + 1];
    const double mid = 0.5 * (s.lo + s.hi);
    for (const auto& piece : pieces_)
      if (piece.from <= mid && mid < piece.to) s.poly = piece.coeffs;
    cd offset = 0.0;
    for (const auto& j : jumps_)
      if (j.at <= s.lo + kEdgeTol) offset += j.height;
    if (offset != 0.0) {
      if (s.poly.empty()) s.poly.push_back(0.0);
      s.poly[0] += offset;
    }
    segments_.push_back(std::move(s));
  }
}

bool Potential::is_zero() const {
  for (const auto& piece : pieces_)
    for (cd c : piece.coeffs)
      if (c != 0.0) return false;
  for (const auto& j : jumps_)
    if (j.height != 0.0) return false;
  for (cd c : trig_.cos)
    if (c != 0.0) return false;
  for (cd c : trig_.sin)
    if (c != 0.0) return false;
  return true;
}

bool Potential::is_piecewise_constant() const {
  for (cd c : trig_.cos)
    if (c != 0.0) return false;
  for (cd c : trig_.sin)
    if (c != 0.0) return false;
  for (const auto& piece : pieces_)
    for (std::size_t k = 1; k < piece.coeffs.size(); ++k)
      if (piece.coeffs[k] != 0.0) return false;
  return true;
}

std::vector<double> Potential::breakpoints() const {
  std::vector<double> b;
  for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) b.push_back(pieces_[i].to);
  for (const auto& j : jumps_) b.push_back(j.at);
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  for (double x : b)
    if (out.empty() || x - out.back() > kEdgeTol) out.push_back(x);
  return out;
}

int Potential::trig_degree() const {
  return static_cast<int>(std::max(trig_.cos.empty() ? 0 : trig_.cos.size() - 1,
                                   trig_.sin.size()));
}

std::size_t Potential::segment_index(double x) const {
  if (!(x >= 0.0 && x <= kPi))
    throw Error(ErrorKind::Domain, "potential: x outside [0, pi]");
  std::size_t i = 0;
  while (i + 1 < segments_.size() && x >= segments_[i + 1].lo) ++i;
  return i;
}

cd Potential::eval_segment(std::size_t segment, double x) const {
  const auto& s = segments_[segment];
  cd v = s.poly.empty() ? cd(0.0) : horner(s.poly, x);
  if (!trig_.cos.empty() || !trig_.sin.empty()) v += eval_trig(trig_, x);
  return v;
}

cd Potential::operator()(double x) const { return eval_segment(segment_index(x), x); }

cd Potential::left_limit(double x) const {
  std::size_t i = segment_index(x);
  if (i > 0 && x <= segments_[i].lo + kEdgeTol) --i;
  return eval_segment(i, x);
}

Potential Potential::conj() const {
  auto pieces = pieces_;
  for (auto& piece : pieces)
    for (auto& c : piece.coeffs) c = std::conj(c);
  auto jumps = jumps_;
  for (auto& j : jumps) j.height = std::conj(j.height);
  auto trig = trig_;
  for (auto& c : trig.cos) c = std::conj(c);
  for (auto& c : trig.sin) c = std::conj(c);
  return Potential(std::move(pieces), std::move(jumps), std::move(trig));
}

Potential Potential::scaled(cd factor) const { return Potential().plus(*this, factor); }

Potential Potential::plus(const Potential& other, cd factor) const {
  std::vector<PolyPiece> pieces;
  if (!pieces_.empty() || !other.pieces_.empty()) {
    std::vector<double> edges = {0.0, kPi};
    for (const auto& piece : pieces_) edges.push_back(piece.to);
    for (const auto& piece : other.pieces_) edges.push_back(piece.to);
    std::sort(edges.begin(), edges.end());
    std::vector<double> uniq;
    for (double e : edges)
      if (uniq.empty() || e - uniq.back() > kEdgeTol) uniq.push_back(e);
    auto poly_at = [](const std::vector<PolyPiece>& ps, double mid) {
      for (const auto& piece : ps)
        if (piece.from <= mid && mid < piece.to) return piece.coeffs;
      return std::vector<cd>{};
    };
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
      const double mid = 0.5 * (uniq[i] + uniq[i + 1]);
      auto a = poly_at(pieces_, mid);
      auto b = poly_at(other.pieces_, mid);
      a.resize(std::max(a.size(), b.size()), 0.0);
      for (std::size_t k = 0; k < b.size(); ++k) a[k] += factor * b[k];
      pieces.push_back({uniq[i], uniq[i + 1], std::move(a)});
    }
  }
  std::vector<Jump> jumps = jumps_;
  for (const auto& j : other.jumps_) {
    auto it = std::find_if(jumps.begin(), jumps.end(),
                           [&](const Jump& x) { return std::abs(x.at - j.at) < kEdgeTol; });
    if (it != jumps.end()) it->height += factor * j.height;
    else jumps.push_back({j.at, factor * j.height});
  }
  TrigSeries trig = trig_;
  trig.cos.resize(std::max(trig.cos.size(), other.trig_.cos.size()), 0.0);
  trig.sin.resize(std::max(trig.sin.size(), other.trig_.sin.size()), 0.0);
  for (std::size_t k = 0; k < other.trig_.cos.size(); ++k) trig.cos[k] += factor * other.trig_.cos[k];
  for (std::size_t k = 0; k < other.trig_.sin.size(); ++k) trig.sin[k] += factor * other.trig_.sin[k];
  return Potential(std::move(pieces), std::move(jumps), std::move(trig));
}

StripParams::StripParams(double nu_, double ball_radius_, double smoothness_)
    : nu(nu_), kappa(std::cosh(2.0 * kPi * nu_)), ball_radius(ball_radius_),
      smoothness(smoothness_) {
  if (!(nu >= 0.0)) throw Error(ErrorKind::Argument, "StripParams: nu < 0");
  if (!(ball_radius >= 0.0)) throw Error(ErrorKind::Argument, "StripParams: R < 0");
  if (!(smoothness >= 0.0 && smoothness <= 1.0))
    throw Error(ErrorKind::Argument, "StripParams: sigma outside [0, 1]");
}

cd eval_u(const Potential& p, double x) { return p(x); }

cd windowed_fourier(const Potential& p, double lo, double hi, cd omega) {
  if (!(lo >= 0.0 && hi <= kPi && lo <= hi))
    throw Error(ErrorKind::Domain, "windowed_fourier: window outside [0, pi]");
  cd sum = 0.0;
  for (const auto& s : p.segments()) {
    const double a = std::max(lo, s.lo), b = std::min(hi, s.hi);
    if (b > a) sum += poly_exp_integral(s.poly, a, b, omega);
  }
  if (!p.trig().cos.empty() || !p.trig().sin.empty())
    sum += trig_exp_integral(p.trig(), lo, hi, omega);
  return sum;
}

cd fourier_strip(const Potential& p, cd rho) { return windowed_fourier(p, 0.0, kPi, rho); }

cd fourier_strip(const Potential& p, cd rho, const StripParams& sp) {
  if (std::abs(rho.imag()) > sp.nu)
    throw Error(ErrorKind::Argument, "fourier_strip: rho outside the strip |Im rho| <= nu");
  return fourier_strip(p, rho);
}

std::vector<cd> windowed_transform_seq(const Potential& p, double x,
                                       std::span<const cd> rhos) {
  if (!(x >= 0.0 && x <= kPi))
    throw Error(ErrorKind::Domain, "windowed_transform_seq: x outside [0, pi]");
  std::vector<cd> out;
  out.reserve(rhos.size());
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    if (!(std::abs(rhos[i] - double(i + 1)) < 0.25))
      throw Error(ErrorKind::Argument, "windowed_transform_seq: |rho_n - n| >= 1/4");
    out.push_back(windowed_fourier(p, 0.0, x, rhos[i]));
  }
  return out;
}

cd cosine_coefficient(const Potential& p, int k) {
  if (k == 0) return windowed_fourier(p, 0.0, kPi, 0.0) / std::sqrt(kPi);
  const double f = double(k);
  const cd c = 0.5 * (windowed_fourier(p, 0.0, kPi, f) + windowed_fourier(p, 0.0, kPi, -f));
  return std::sqrt(2.0 / kPi) * c;
}

namespace {

bool pure_cosine(const Potential& p) {
  if (!p.pieces().empty() || !p.jumps().empty()) return false;
  for (cd c : p.trig().sin)
    if (c != 0.0) return false;
  return true;
}

}  // namespace

double sobolev_norm(const Potential& p, double sigma) {
  if (!(sigma >= 0.0 && sigma <= 1.0))
    throw Error(ErrorKind::Argument, "sobolev_norm: sigma outside [0, 1]");
  auto weight = [sigma](double k) { return std::pow(1.0 + k * k, sigma); };
  if (pure_cosine(p)) {
    const auto& a = p.trig().cos;
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double scale = k == 0 ? kPi : 0.5 * kPi;
      sum += weight(double(k)) * scale * std::norm(a[k]);
    }
    return std::sqrt(sum);
  }
  constexpr int K = 1 << 14;
  double sum = 0.0, block_mid = 0.0, block_top = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double c2 = std::norm(cosine_coefficient(p, k));
    sum += weight(double(k)) * c2;
    if (k > K / 4 && k <= K / 2) block_mid += c2;
    if (k > K / 2) block_top += c2;
  }
  if (block_top > 0.0 && block_mid > 0.0) {
    // Geometric continuation of dyadic blocks: block j+1 ~ ratio * block j.
    const double ratio = (block_top / block_mid) * std::pow(4.0, sigma);
    if (ratio >= 1.0 - 1e-3 && block_top > 1e-28 * sum)
      return std::numeric_limits<double>::infinity();
    if (ratio < 1.0)
      sum += block_top * weight(1.5 * K) * ratio / (1.0 - ratio);
  }
  return std::sqrt(sum);
}

Potential mollify(const Potential& p, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Argument, "mollify: eps must be positive");
  const int K = static_cast<int>(std::ceil(1.0 / eps - 1e-12));
  if (pure_cosine(p)) {
    auto a = p.trig().cos;
    if (static_cast<int>(a.size()) > K + 1) a.resize(K + 1);
    return Potential::cosine_series(std::move(a));
  }
  std::vector<cd> a(K + 1);
  for (int k = 0; k <= K; ++k) {
    const cd c = cosine_coefficient(p, k);
    a[k] = k == 0 ? c / std::sqrt(kPi) : c / std::sqrt(0.5 * kPi);
  }
  return Potential::cosine_series(std::move(a));
}

double l2_norm(const Potential& p) {
  static const Rule r = gauss_legendre(16);
  const double panel = std::min(0.05, 1.0 / (p.trig_degree() + 1.0));
  double sum = 0.0;
  for (std::size_t s = 0; s < p.segments().size(); ++s) {
    const auto& seg = p.segments()[s];
    const int count = std::max(1, int(std::ceil((seg.hi - seg.lo) / panel)));
    const double h = (seg.hi - seg.lo) / count;
    for (int i = 0; i < count; ++i) {
      const double mid = seg.lo + (i + 0.5) * h;
      for (std::size_t q = 0; q < r.nodes.size(); ++q)
        sum += 0.5 * h * r.weights[q] * std::norm(p.eval_segment(s, mid + 0.5 * h * r.nodes[q]));
    }
  }
  return std::sqrt(sum);
}

double l2_distance(const Potential& a, const Potential& b) { return l2_norm(a.plus(b, -1.0)); }

namespace {

cd complex_from_json(const nlohmann::json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw Error(ErrorKind::Parse, "potential: expected a number or [re, im]");
}

nlohmann::json complex_to_json(cd c) {
  if (c.imag() == 0.0) return c.real();
  return nlohmann::json::array({c.real(), c.imag()});
}

std::vector<cd> complex_list(const nlohmann::json& v) {
  if (!v.is_array()) throw Error(ErrorKind::Parse, "potential: expected an array");
  std::vector<cd> out;
  for (const auto& e : v) out.push_back(complex_from_json(e));
  return out;
}

}  // namespace

Potential potential_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "potential: expected a JSON object");
  try {
    std::vector<PolyPiece> pieces;
    if (j.contains("pieces")) {
      for (const auto& e : j.at("pieces"))
        pieces.push_back({e.at("from").get<double>(), e.at("to").get<double>(),
                          complex_list(e.at("poly"))});
    }
    std::vector<Jump> jumps;
    if (j.contains("jumps")) {
      for (const auto& e : j.at("jumps"))
        jumps.push_back({e.at("at").get<double>(), complex_from_json(e.at("height"))});
    }
    TrigSeries trig;
    if (j.contains("trig")) {
      const auto& t = j.at("trig");
      if (t.contains("cos")) trig.cos = complex_list(t.at("cos"));
      if (t.contains("sin")) trig.sin = complex_list(t.at("sin"));
    }
    try {
      return Potential(std::move(pieces), std::move(jumps), std::move(trig));
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("potential: ") + e.what());
  }
}

nlohmann::json potential_to_json(const Potential& p) {
  nlohmann::json j = nlohmann::json::object();
  auto pieces = nlohmann::json::array();
  for (const auto& piece : p.pieces()) {
    auto poly = nlohmann::json::array();
    for (cd c : piece.coeffs) poly.push_back(complex_to_json(c));
    pieces.push_back({{"from", piece.from}, {"to", piece.to}, {"poly", poly}});
  }
  auto jumps = nlohmann::json::array();
  for (const auto& jump : p.jumps())
    jumps.push_back({{"at", jump.at}, {"height", complex_to_json(jump.height)}});
  auto cos = nlohmann::json::array(), sin = nlohmann::json::array();
  for (cd c : p.trig().cos) cos.push_back(complex_to_json(c));
  for (cd c : p.trig().sin) sin.push_back(complex_to_json(c));
  j["pieces"] = pieces;
  j["jumps"] = jumps;
  j["trig"] = {{"cos", cos}, {"sin", sin}};
  return j;
}

}  // namespace quasispec
