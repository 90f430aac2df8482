#include "icsbench/arcusum.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "icsbench/series_frame.hpp"

namespace icsbench::arcusum {

ArModel fit_ar(const std::vector<double>& series, std::size_t order) {
  if (order < 1) throw ValidationError("AR order must be >= 1");
  if (series.size() <= 10 * order) {
    throw ValidationError("AR fit needs more than 10*p samples");
  }

  ArModel model;
  model.order = order;

  const double first = series[0];
  bool constant = true;
  for (double v : series) {
    if (v != first) {
      constant = false;
      break;
    }
  }
  if (constant) {
    model.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(order));
    model.intercept = first;
    model.residual_mean = 0.0;
    model.residual_std = 0.0;
    model.condition_number = std::numeric_limits<double>::infinity();
    model.degenerate = true;
    return model;
  }

  const std::size_t rows = series.size() - order;
  Eigen::MatrixXd design(rows, order + 1);
  Eigen::VectorXd target(rows);
  for (std::size_t k = 0; k < rows; ++k) {
    design(k, 0) = 1.0;
    for (std::size_t i = 1; i <= order; ++i) {
      design(k, static_cast<Eigen::Index>(i)) = series[order + k - i];
    }
    target(static_cast<Eigen::Index>(k)) = series[order + k];
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd solution = svd.solve(target);
  const double smin = svd.singularValues().minCoeff();
  model.condition_number = smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                                      : std::numeric_limits<double>::infinity();

  model.intercept = solution(0);
  model.coefficients = solution.tail(static_cast<Eigen::Index>(order));

  const Eigen::VectorXd fit_residuals = target - design * solution;
  model.residual_mean = fit_residuals.mean();
  model.residual_std =
      std::sqrt((fit_residuals.array() - model.residual_mean).square().sum() / static_cast<double>(rows));
  return model;
}

std::vector<double> residuals(const ArModel& model, const std::vector<double>& series) {
  if (series.size() <= model.order) throw ValidationError("series shorter than the AR order");
  std::vector<double> out(series.size(), 0.0);
  for (std::size_t k = model.order; k < series.size(); ++k) {
    double prediction = model.intercept;
    for (std::size_t i = 1; i <= model.order; ++i) {
      prediction += model.coefficients(static_cast<Eigen::Index>(i - 1)) * series[k - i];
    }
    out[k] = series[k] - prediction;
  }
  return out;
}

CusumTrace cusum_detect(const std::vector<double>& residual_series, const CusumParams& params,
                        double sigma, double mu, std::size_t warmup) {
  if (params.control_limit <= 0.0) throw ValidationError("control limit must be positive");
  if (params.min_mean_shift < 0.0) throw ValidationError("min mean shift must be >= 0");

  CusumTrace trace;
  trace.upper.assign(residual_series.size(), 0.0);
  trace.lower.assign(residual_series.size(), 0.0);
  trace.alarms.values.assign(residual_series.size(), 0);
  trace.alarms.warmup = warmup;
  if (sigma <= 0.0) {
    trace.degenerate = true;
    return trace;
  }

  const double kappa = params.slack(sigma);
  const double limit = params.control_limit * sigma;
  double s_up = 0.0;
  double s_dn = 0.0;
  for (std::size_t k = warmup; k < residual_series.size(); ++k) {
    const double z = residual_series[k] - mu;
    s_up = std::max(0.0, s_up + z - kappa);
    s_dn = std::max(0.0, s_dn - z - kappa);
    trace.upper[k] = s_up;
    trace.lower[k] = s_dn;
    if (s_up > limit || s_dn > limit) {
      trace.alarms.values[k] = 1;
      s_up = 0.0;
      s_dn = 0.0;
    }
  }
  return trace;
}

std::string ArModel::to_json_string() const {
  nlohmann::json j;
  j["format"] = "icsbench-ar-model";
  j["version"] = 1;
  j["order"] = order;
  j["intercept"] = intercept;
  j["residual_mean"] = residual_mean;
  j["residual_std"] = residual_std;
  j["condition_number"] = std::isfinite(condition_number) ? condition_number : -1.0;
  j["degenerate"] = degenerate;
  std::vector<double> coeffs(coefficients.data(), coefficients.data() + coefficients.size());
  j["coefficients"] = coeffs;
  return j.dump();
}

ArModel ArModel::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "icsbench-ar-model") throw ValidationError("not an AR model file");
  ArModel m;
  m.order = j.at("order").get<std::size_t>();
  m.intercept = j.at("intercept").get<double>();
  m.residual_mean = j.at("residual_mean").get<double>();
  m.residual_std = j.at("residual_std").get<double>();
  const double cond = j.at("condition_number").get<double>();
  m.condition_number = cond < 0.0 ? std::numeric_limits<double>::infinity() : cond;
  m.degenerate = j.at("degenerate").get<bool>();
  const auto coeffs = j.at("coefficients").get<std::vector<double>>();
  m.coefficients = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  return m;
}

void write_cusum_csv(const std::vector<double>& residual_series, const CusumTrace& trace,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "step,residual,cusum_upper,cusum_lower,alarm\n";
  char buf[128];
  for (std::size_t i = 0; i < residual_series.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%d\n", i, residual_series[i], trace.upper[i],
                  trace.lower[i], static_cast<int>(trace.alarms.values[i]));
    out << buf;
  }
}

}  // namespace icsbench::arcusum
