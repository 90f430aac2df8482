#include "icsbench/pasad.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "icsbench/rng.hpp"
#include "icsbench/series_frame.hpp"

namespace icsbench::pasad {

namespace {

constexpr std::size_t kDenseLimit = 512;
constexpr double kResidualTol = 1e-8;

/// Gram matrix of the Hankel trajectory matrix, G = X X^T, using
/// G(i+1, l+1) = G(i, l) - s[i]s[l] + s[i+K]s[l+K].
Eigen::MatrixXd lagged_gram(const std::vector<double>& s, std::size_t lag, std::size_t k_count) {
  Eigen::MatrixXd g(lag, lag);
  for (std::size_t l = 0; l < lag; ++l) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k_count; ++j) acc += s[j] * s[l + j];
    g(0, l) = acc;
    g(l, 0) = acc;
  }
  for (std::size_t i = 1; i < lag; ++i) {
    for (std::size_t l = i; l < lag; ++l) {
      const double v = g(i - 1, l - 1) - s[i - 1] * s[l - 1] + s[i - 1 + k_count] * s[l - 1 + k_count];
      g(i, l) = v;
      g(l, i) = v;
    }
  }
  return g;
}

void canonicalize_sign(Eigen::MatrixXd& basis) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    Eigen::Index max_row = 0;
    basis.col(c).cwiseAbs().maxCoeff(&max_row);
    if (basis(max_row, c) < 0.0) basis.col(c) = -basis.col(c);
  }
}

struct EigResult {
  Eigen::MatrixXd vectors;  // columns, by descending eigenvalue
  Eigen::VectorXd values;
};

EigResult top_eigenpairs_dense(const Eigen::MatrixXd& g, std::size_t r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
  const Eigen::Index n = g.rows();
  EigResult out;
  out.vectors.resize(n, static_cast<Eigen::Index>(r));
  out.values.resize(static_cast<Eigen::Index>(r));
  for (std::size_t i = 0; i < r; ++i) {
    out.vectors.col(static_cast<Eigen::Index>(i)) = solver.eigenvectors().col(n - 1 - static_cast<Eigen::Index>(i));
    out.values(static_cast<Eigen::Index>(i)) = solver.eigenvalues()(n - 1 - static_cast<Eigen::Index>(i));
  }
  return out;
}

EigResult top_eigenpairs_iterative(const Eigen::MatrixXd& g, std::size_t r) {
  const Eigen::Index n = g.rows();
  const Eigen::Index block = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(r) + 8);

  rng::GaussianStream stream(0x9d2c5680u);
  Eigen::MatrixXd q(n, block);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < block; ++j) q(i, j) = stream.next();
  }
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(n, block);

  const double scale = g.diagonal().maxCoeff();
  EigResult out;
  for (int iter = 0; iter < 300; ++iter) {
    Eigen::MatrixXd z = g * q;
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ() * Eigen::MatrixXd::Identity(n, block);

    Eigen::MatrixXd t = q.transpose() * g * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t);
    Eigen::MatrixXd ritz(n, static_cast<Eigen::Index>(r));
    Eigen::VectorXd vals(static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < r; ++i) {
      ritz.col(static_cast<Eigen::Index>(i)) = q * small.eigenvectors().col(block - 1 - static_cast<Eigen::Index>(i));
      vals(static_cast<Eigen::Index>(i)) = small.eigenvalues()(block - 1 - static_cast<Eigen::Index>(i));
    }
    const double residual = (g * ritz - ritz * vals.asDiagonal()).colwise().norm().maxCoeff();
    if (residual <= kResidualTol * std::max(scale, 1e-300) || iter == 299) {
      out.vectors = std::move(ritz);
      out.values = std::move(vals);
      break;
    }
  }
  return out;
}

}  // namespace

PasadModel train(const std::vector<double>& series, std::size_t n, std::size_t lag, std::size_t r) {
  if (series.size() < n) throw ValidationError("training series shorter than N");
  if (lag < 2 || lag > n - 1) throw ValidationError("need 2 <= L <= N-1");
  if (r < 1 || r > lag) throw ValidationError("need 1 <= r <= L");

  const std::size_t k_count = n - lag + 1;
  const Eigen::MatrixXd gram = lagged_gram(series, lag, k_count);

  EigResult eig = lag <= kDenseLimit ? top_eigenpairs_dense(gram, r) : top_eigenpairs_iterative(gram, r);
  canonicalize_sign(eig.vectors);

  // Effective numerical rank from the full spectrum when available, else
  // from the computed leading values.
  double lambda_max = eig.values.size() ? eig.values(0) : 0.0;
  std::size_t effective = 0;
  if (lag <= kDenseLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(gram, Eigen::EigenvaluesOnly);
    lambda_max = full.eigenvalues().maxCoeff();
    for (Eigen::Index i = 0; i < full.eigenvalues().size(); ++i) {
      if (full.eigenvalues()(i) > 1e-12 * std::max(lambda_max, 0.0)) ++effective;
    }
  } else {
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      if (eig.values(i) > 1e-12 * std::max(lambda_max, 0.0)) ++effective;
    }
  }

  Eigen::VectorXd mean_lagged(lag);
  for (std::size_t i = 0; i < lag; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k_count; ++j) acc += series[i + j];
    mean_lagged(static_cast<Eigen::Index>(i)) = acc / static_cast<double>(k_count);
  }

  PasadModel model;
  model.lag = lag;
  model.subspace_dim = r;
  model.train_len = n;
  model.basis = std::move(eig.vectors);
  model.centroid = model.basis.transpose() * mean_lagged;
  model.effective_rank = effective;
  return model;
}

std::vector<double> score(const PasadModel& model, const std::vector<double>& series) {
  if (series.size() < model.lag) throw ValidationError("series shorter than the lag length");
  const std::size_t lag = model.lag;
  std::vector<double> departure(series.size(), 0.0);
  Eigen::VectorXd lagged(lag);
  for (std::size_t j = lag - 1; j < series.size(); ++j) {
    for (std::size_t i = 0; i < lag; ++i) {
      lagged(static_cast<Eigen::Index>(i)) = series[j - lag + 1 + i];
    }
    departure[j] = (model.centroid - model.basis.transpose() * lagged).squaredNorm();
  }
  return departure;
}

AlarmSeries detect(const PasadModel& model, const std::vector<double>& series, double theta) {
  if (theta <= 0.0) throw ValidationError("departure threshold must be positive");
  const auto departure = score(model, series);
  AlarmSeries alarms;
  alarms.warmup = model.lag - 1;
  alarms.values.resize(departure.size(), 0);
  for (std::size_t j = alarms.warmup; j < departure.size(); ++j) {
    alarms.values[j] = departure[j] > theta ? 1 : 0;
  }
  return alarms;
}

std::string PasadModel::to_json_string() const {
  nlohmann::json j;
  j["format"] = "icsbench-pasad-model";
  j["version"] = 1;
  j["lag"] = lag;
  j["subspace_dim"] = subspace_dim;
  j["train_len"] = train_len;
  j["theta"] = theta;
  j["effective_rank"] = effective_rank;
  std::vector<double> basis_data(basis.data(), basis.data() + basis.size());
  j["basis_col_major"] = basis_data;
  std::vector<double> centroid_data(centroid.data(), centroid.data() + centroid.size());
  j["centroid"] = centroid_data;
  return j.dump();
}

PasadModel PasadModel::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "icsbench-pasad-model") throw ValidationError("not a pasad model file");
  PasadModel m;
  m.lag = j.at("lag").get<std::size_t>();
  m.subspace_dim = j.at("subspace_dim").get<std::size_t>();
  m.train_len = j.at("train_len").get<std::size_t>();
  m.theta = j.at("theta").get<double>();
  m.effective_rank = j.at("effective_rank").get<std::size_t>();
  const auto basis_data = j.at("basis_col_major").get<std::vector<double>>();
  m.basis = Eigen::Map<const Eigen::MatrixXd>(basis_data.data(), m.lag, m.subspace_dim);
  const auto centroid_data = j.at("centroid").get<std::vector<double>>();
  m.centroid = Eigen::Map<const Eigen::VectorXd>(centroid_data.data(), static_cast<Eigen::Index>(centroid_data.size()));
  return m;
}

void PasadModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << to_json_string();
}

PasadModel PasadModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_string(text);
}

void write_score_csv(const std::vector<double>& departure, std::size_t warmup, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "step,departure,warmup\n";
  char buf[64];
  for (std::size_t i = 0; i < departure.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%d\n", i, departure[i], i < warmup ? 1 : 0);
    out << buf;
  }
}

}  // namespace icsbench::pasad
