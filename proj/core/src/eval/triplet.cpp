#include "crl/eval/triplet.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numeric>

#include "crl/core/error.hpp"
#include "crl/core/rng.hpp"

namespace crl::eval {
namespace {

struct Unit {
  std::vector<double> v;
  double norm = 0.0;
};

Unit normalize(std::span<const double> x) {
  Unit u{{x.begin(), x.end()}, 0.0};
  double s = 0.0;
  for (double e : x) s += e * e;
  u.norm = std::sqrt(s);
  if (u.norm > 1e-12) {
    for (double& e : u.v) e /= u.norm;
  }
  return u;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Pulls a gradient w.r.t. u/|u| back to u.
std::vector<double> through_normalize(const Unit& u, const std::vector<double>& g) {
  std::vector<double> out(g.size(), 0.0);
  if (u.norm <= 1e-12) return out;
  double proj = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) proj += u.v[i] * g[i];
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = (g[i] - u.v[i] * proj) / u.norm;
  return out;
}

void check_dims(std::size_t a, std::size_t p, std::size_t n) {
  if (a != p || a != n) {
    throw ShapeError("triplet members differ in width: " + std::to_string(a) + ", " + std::to_string(p) + ", " +
                     std::to_string(n));
  }
}

// std::max(0.0, NaN) is 0; keep NaN so divergence is detected.
double clamp_at_zero(double v) { return std::isnan(v) ? v : std::max(0.0, v); }

constexpr std::uint64_t kShuffleSalt = 0x747269706c6574ULL;

}  // namespace

double triplet_loss(std::span<const double> anchor, std::span<const double> positive,
                    std::span<const double> negative, double margin) {
  check_dims(anchor.size(), positive.size(), negative.size());
  const auto a = normalize(anchor), p = normalize(positive), n = normalize(negative);
  return clamp_at_zero(sq_dist(a.v, p.v) - sq_dist(a.v, n.v) + margin);
}

TripletLossGrad triplet_loss_grad(std::span<const double> anchor, std::span<const double> positive,
                                  std::span<const double> negative, double margin) {
  check_dims(anchor.size(), positive.size(), negative.size());
  const auto a = normalize(anchor), p = normalize(positive), n = normalize(negative);
  const std::size_t d = anchor.size();
  TripletLossGrad out;
  const double slack = sq_dist(a.v, p.v) - sq_dist(a.v, n.v) + margin;
  out.loss = clamp_at_zero(slack);
  if (slack <= 0.0) {
    out.anchor.assign(d, 0.0);
    out.positive.assign(d, 0.0);
    out.negative.assign(d, 0.0);
    return out;
  }
  std::vector<double> ga(d), gp(d), gn(d);
  for (std::size_t i = 0; i < d; ++i) {
    ga[i] = 2.0 * (n.v[i] - p.v[i]);
    gp[i] = -2.0 * (a.v[i] - p.v[i]);
    gn[i] = 2.0 * (a.v[i] - n.v[i]);
  }
  out.anchor = through_normalize(a, ga);
  out.positive = through_normalize(p, gp);
  out.negative = through_normalize(n, gn);
  return out;
}

void TripletTrainConfig::validate() const {
  if (!(margin > 0.0)) throw Error(ErrorKind::config, "triplet margin must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw Error(ErrorKind::config, "lr_decay must lie in (0, 1]");
  if (decay_step < 1) throw Error(ErrorKind::config, "decay_step must be at least 1");
  if (batch_size < 1) throw Error(ErrorKind::config, "batch_size must be at least 1");
  if (!(lr >= 0.0)) throw Error(ErrorKind::config, "lr must be nonnegative");
}

Mlp Mlp::init(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim, std::uint64_t seed) {
  Mlp m{in_dim, hidden_dim, out_dim, {}, {}, {}, {}};
  Rng rng(seed);
  auto fill = [&](std::vector<double>& v, std::size_t size, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    v.resize(size);
    for (double& e : v) e = (2.0 * rng.uniform() - 1.0) * bound;
  };
  fill(m.w1, hidden_dim * in_dim, in_dim);
  fill(m.b1, hidden_dim, in_dim);
  fill(m.w2, out_dim * hidden_dim, hidden_dim);
  fill(m.b2, out_dim, hidden_dim);
  return m;
}

std::vector<double> Mlp::forward(std::span<const float> x) const {
  std::vector<double> h(hidden_dim), y(out_dim);
  for (std::size_t i = 0; i < hidden_dim; ++i) {
    double z = b1[i];
    for (std::size_t j = 0; j < in_dim; ++j) z += w1[i * in_dim + j] * x[j];
    h[i] = clamp_at_zero(z);
  }
  for (std::size_t i = 0; i < out_dim; ++i) {
    double z = b2[i];
    for (std::size_t j = 0; j < hidden_dim; ++j) z += w2[i * hidden_dim + j] * h[j];
    y[i] = z;
  }
  return y;
}

EmbeddingMatrix Mlp::apply(const EmbeddingMatrix& x) const {
  if (x.dims() != in_dim) throw ShapeError("MLP expects width " + std::to_string(in_dim) + ", got " + x.shape_string());
  std::vector<float> out;
  out.reserve(x.rows() * out_dim);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (double v : forward(x.row(r))) out.push_back(static_cast<float>(v));
  }
  return EmbeddingMatrix(x.rows(), out_dim, std::move(out), x.ids());
}

double mean_triplet_loss(const Mlp& mlp, const EmbeddingMatrix& x, std::span<const Triplet> triplets, double margin) {
  if (triplets.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : triplets) {
    sum += triplet_loss(mlp.forward(x.row(t.anchor)), mlp.forward(x.row(t.positive)), mlp.forward(x.row(t.negative)),
                        margin);
  }
  return sum / static_cast<double>(triplets.size());
}

namespace {

struct Grads {
  std::vector<double> w1, b1, w2, b2;
  explicit Grads(const Mlp& m)
      : w1(m.w1.size(), 0.0), b1(m.b1.size(), 0.0), w2(m.w2.size(), 0.0), b2(m.b2.size(), 0.0) {}
};

// Accumulates d(loss)/d(params) for output gradient `gy` at input `x`.
void backprop(const Mlp& m, std::span<const float> x, const std::vector<double>& gy, Grads& g) {
  std::vector<double> pre(m.hidden_dim), h(m.hidden_dim);
  for (std::size_t i = 0; i < m.hidden_dim; ++i) {
    double z = m.b1[i];
    for (std::size_t j = 0; j < m.in_dim; ++j) z += m.w1[i * m.in_dim + j] * x[j];
    pre[i] = z;
    h[i] = clamp_at_zero(z);
  }
  std::vector<double> gh(m.hidden_dim, 0.0);
  for (std::size_t i = 0; i < m.out_dim; ++i) {
    g.b2[i] += gy[i];
    for (std::size_t j = 0; j < m.hidden_dim; ++j) {
      g.w2[i * m.hidden_dim + j] += gy[i] * h[j];
      gh[j] += gy[i] * m.w2[i * m.hidden_dim + j];
    }
  }
  for (std::size_t i = 0; i < m.hidden_dim; ++i) {
    if (pre[i] <= 0.0) continue;
    g.b1[i] += gh[i];
    for (std::size_t j = 0; j < m.in_dim; ++j) g.w1[i * m.in_dim + j] += gh[i] * x[j];
  }
}

struct AdamState {
  std::vector<double> m, v;
};

void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& s, double lr,
               const TripletTrainConfig& c, std::size_t t) {
  if (s.m.empty()) {
    s.m.assign(params.size(), 0.0);
    s.v.assign(params.size(), 0.0);
  }
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.m[i] = c.beta1 * s.m[i] + (1.0 - c.beta1) * grad[i];
    s.v[i] = c.beta2 * s.v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
    params[i] -= lr * (s.m[i] / bc1) / (std::sqrt(s.v[i] / bc2) + c.adam_eps);
  }
}

}  // namespace

MlpTrainResult train_projection_mlp(const EmbeddingMatrix& x, std::span<const Triplet> triplets,
                                    const TripletTrainConfig& config) {
  config.validate();
  for (const auto& t : triplets) {
    if (t.anchor >= x.rows() || t.positive >= x.rows() || t.negative >= x.rows()) {
      throw Error(ErrorKind::consistency, "triplet references a row outside " + x.shape_string());
    }
  }
  const std::size_t hidden = config.hidden_dim ? config.hidden_dim : x.dims();
  const std::size_t out_dim = config.output_dim ? config.output_dim : x.dims();
  MlpTrainResult result{Mlp::init(x.dims(), hidden, out_dim, config.seed), {}, 0.0, 0.0};
  Mlp& mlp = result.mlp;
  result.initial_loss = mean_triplet_loss(mlp, x, triplets, config.margin);

  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed ^ kShuffleSalt);
  AdamState sw1, sb1, sw2, sb2;
  std::size_t step = 0;
  double lr = config.lr;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (epoch > 0 && epoch % config.decay_step == 0) lr *= config.lr_decay;
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - begin);
      Grads g(mlp);
      for (std::size_t k = begin; k < end; ++k) {
        const Triplet& t = triplets[order[k]];
        const auto ya = mlp.forward(x.row(t.anchor));
        const auto yp = mlp.forward(x.row(t.positive));
        const auto yn = mlp.forward(x.row(t.negative));
        auto tg = triplet_loss_grad(ya, yp, yn, config.margin);
        if (!std::isfinite(tg.loss)) throw DivergenceError(epoch);
        epoch_loss += tg.loss;
        if (tg.loss <= 0.0) continue;
        for (auto* gv : {&tg.anchor, &tg.positive, &tg.negative}) {
          for (double& e : *gv) e *= scale;
        }
        backprop(mlp, x.row(t.anchor), tg.anchor, g);
        backprop(mlp, x.row(t.positive), tg.positive, g);
        backprop(mlp, x.row(t.negative), tg.negative, g);
      }
      ++step;
      adam_step(mlp.w1, g.w1, sw1, lr, config, step);
      adam_step(mlp.b1, g.b1, sb1, lr, config, step);
      adam_step(mlp.w2, g.w2, sw2, lr, config, step);
      adam_step(mlp.b2, g.b2, sb2, lr, config, step);
    }
    const double mean = triplets.empty() ? 0.0 : epoch_loss / static_cast<double>(triplets.size());
    if (!std::isfinite(mean)) throw DivergenceError(epoch);
    result.loss_curve.push_back(mean);
  }
  result.final_loss = mean_triplet_loss(mlp, x, triplets, config.margin);
  if (!std::isfinite(result.final_loss)) throw DivergenceError(config.epochs);
  return result;
}

std::vector<Triplet> read_triplets(const std::filesystem::path& path, const EmbeddingMatrix& x) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open triplet file " + path.string());
  std::vector<Triplet> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({x.index_of(j.at("anchor").get<std::string>()), x.index_of(j.at("positive").get<std::string>()),
                     x.index_of(j.at("negative").get<std::string>())});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad triplet: ") + e.what(), line.substr(0, 200));
    }
  }
  return out;
}

}  // namespace crl::eval
