#include "gamtl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "gamtl/errors.hpp"
#include "gamtl/random.hpp"

namespace gamtl {

void validate(const SynSpec& spec) {
  if (spec.n_train < 1 || spec.n_test < 1) {
    throw InvalidInput("sample counts must be at least 1");
  }
  if (!(spec.noise_std >= 0.0) || !std::isfinite(spec.noise_std)) {
    throw InvalidInput("noise_std must be finite and nonnegative");
  }
}

namespace {

constexpr Index kSynDim = 30;
constexpr Index kSynTasks = 20;

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Column-major fill so the draw order is one sample vector at a time.
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) m(r, c) = normal(rng);
  }
  return m;
}

// Shared inputs per split, independent noise per task and sample.
void draw_regression_data(const WeightMatrix& W, const SynSpec& spec, Rng& rng,
                          SyntheticDataset& out) {
  const Matrix X_train = gaussian_matrix(W.rows(), spec.n_train, rng);
  const Matrix X_test = gaussian_matrix(W.rows(), spec.n_test, rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Index t = 0; t < W.cols(); ++t) {
    TaskDataset train{static_cast<int>(t), X_train, X_train.transpose() * W.col(t)};
    for (Index i = 0; i < spec.n_train; ++i) train.y[i] += spec.noise_std * noise(rng);
    TaskDataset test{static_cast<int>(t), X_test, X_test.transpose() * W.col(t)};
    for (Index i = 0; i < spec.n_test; ++i) test.y[i] += spec.noise_std * noise(rng);
    out.train.push_back(std::move(train));
    out.test.push_back(std::move(test));
  }
}

}  // namespace

SyntheticDataset gen_syn1(const SynSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, streams::kData));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const Vector w_g1 = Vector::Ones(kSynDim) + gaussian_matrix(kSynDim, 1, rng);
  const Vector w_g2 = -Vector::Ones(kSynDim) + gaussian_matrix(kSynDim, 1, rng);

  SyntheticDataset out;
  out.true_W.resize(kSynDim, kSynTasks);
  for (Index t = 0; t < 18; ++t) {
    Vector u(kSynDim);
    for (Index k = 0; k < kSynDim; ++k) u[k] = uniform(rng);
    out.true_W.col(t) = (t < 12 ? w_g1 : w_g2) + 0.1 * u;
  }
  out.true_W.col(18) = gaussian_matrix(kSynDim, 1, rng);
  out.true_W.col(19) = std::sqrt(10.0) * gaussian_matrix(kSynDim, 1, rng);

  std::vector<int> g1(12), g2(6);
  std::iota(g1.begin(), g1.end(), 0);
  std::iota(g2.begin(), g2.end(), 12);
  out.groups = {g1, g2, {18}, {19}};

  draw_regression_data(out.true_W, spec, rng, out);
  return out;
}

SyntheticDataset gen_syn2(const SynSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, streams::kData));
  const Vector w0 = gaussian_matrix(kSynDim, 1, rng);

  SyntheticDataset out;
  out.true_W.resize(kSynDim, kSynTasks);
  for (Index t = 0; t < kSynTasks; ++t) {
    // The angle index wraps so the last task is an exact copy of the first.
    const Index k = t % (kSynTasks - 1);
    Vector w = w0;
    if (k != 0) {
      const double theta =
          2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(kSynTasks - 1);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      w[0] = c * w0[0] - s * w0[1];
      w[1] = s * w0[0] + c * w0[1];
    }
    out.true_W.col(t) = w;
  }
  draw_regression_data(out.true_W, spec, rng, out);
  return out;
}

std::vector<std::vector<int>> syn2_ring_neighbors() {
  const int steps = static_cast<int>(kSynTasks) - 1;
  std::vector<std::vector<int>> out;
  for (int t = 0; t < kSynTasks; ++t) {
    const int k = t % steps;
    out.push_back({(k + 1) % steps, (k + steps - 1) % steps});
  }
  return out;
}

void validate(const WienerNetworkSpec& spec) {
  if (spec.n_agents < 2) throw InvalidInput("need at least two agents");
  if (spec.samples_per_agent < 1) throw InvalidInput("need at least one sample");
  if (spec.burn_in < 2) throw InvalidInput("burn_in must be at least 2");
  if (!(spec.rho > -1.0 && spec.rho < 1.0)) throw InvalidInput("rho must lie in (-1, 1)");
  if (spec.cluster_offsets.size() != spec.clusters.size()) {
    throw InvalidInput("need one coefficient offset per cluster");
  }
  std::vector<int> seen(static_cast<std::size_t>(spec.n_agents), 0);
  for (const auto& cluster : spec.clusters) {
    for (int agent : cluster) {
      if (agent < 0 || agent >= spec.n_agents) throw InvalidInput("cluster member out of range");
      ++seen[static_cast<std::size_t>(agent)];
    }
  }
  for (int count : seen) {
    if (count != 1) throw InvalidInput("clusters must partition the agents");
  }
  for (const auto& range : {spec.input_variance_range, spec.noise_variance_range}) {
    if (!(range[0] > 0.0 && range[0] <= range[1])) {
      throw InvalidInput("variance ranges must be positive and ordered");
    }
  }
  for (const auto& [a, b] : spec.topology) {
    if (a < 0 || b < 0 || a >= spec.n_agents || b >= spec.n_agents || a == b) {
      throw InvalidInput("topology edge out of range");
    }
  }
}

std::vector<std::pair<int, int>> default_wiener_topology() {
  const std::vector<std::vector<int>> clusters{{0, 1, 2}, {3, 4, 5}, {6, 7}, {8, 9}};
  std::vector<std::pair<int, int>> edges;
  for (const auto& c : clusters) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) edges.emplace_back(c[i], c[j]);
    }
  }
  edges.insert(edges.end(), {{2, 3}, {5, 6}, {7, 8}, {9, 0}});
  return edges;
}

double wiener_nonlinearity(double y) {
  if (y >= 0.0) return y / (3.0 * std::sqrt(0.1 + 0.9 * y * y));
  return -y * y * (1.0 - std::exp(0.7 * y)) / 3.0;
}

Matrix metropolis_weights(Index nodes, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::set<int>> neighbors(static_cast<std::size_t>(nodes));
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= nodes || b >= nodes || a == b) {
      throw InvalidInput("edge out of range");
    }
    neighbors[static_cast<std::size_t>(a)].insert(b);
    neighbors[static_cast<std::size_t>(b)].insert(a);
  }
  Matrix A = Matrix::Zero(nodes, nodes);
  for (Index k = 0; k < nodes; ++k) {
    const auto& nk = neighbors[static_cast<std::size_t>(k)];
    double off = 0.0;
    for (int l : nk) {
      const auto size_k = static_cast<double>(nk.size() + 1);
      const auto size_l = static_cast<double>(neighbors[static_cast<std::size_t>(l)].size() + 1);
      A(k, l) = 1.0 / std::max(size_k, size_l);
      off += A(k, l);
    }
    A(k, k) = 1.0 - off;
  }
  return A;
}

WienerNetworkData gen_wiener_network(const WienerNetworkSpec& spec) {
  validate(spec);
  const Index K = spec.n_agents;
  const auto topology = spec.topology.empty() ? default_wiener_topology() : spec.topology;

  WienerNetworkData out;
  out.cluster_W.resize(2, K);
  for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
    for (int agent : spec.clusters[c]) {
      out.cluster_W(0, agent) = spec.base_coeff[0] + spec.cluster_offsets[c][0];
      out.cluster_W(1, agent) = spec.base_coeff[1] + spec.cluster_offsets[c][1];
    }
  }
  out.mixing = metropolis_weights(K, topology);
  out.W_star = out.cluster_W * out.mixing;

  Rng rng(derive_seed(spec.seed, streams::kData));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> input_var(spec.input_variance_range[0],
                                                   spec.input_variance_range[1]);
  std::uniform_real_distribution<double> noise_var(spec.noise_variance_range[0],
                                                   spec.noise_variance_range[1]);
  out.input_variance.resize(K);
  out.noise_variance.resize(K);
  for (Index k = 0; k < K; ++k) {
    out.input_variance[k] = input_var(rng);
    out.noise_variance[k] = noise_var(rng);
  }

  const Index total = spec.burn_in + spec.samples_per_agent;
  for (Index k = 0; k < K; ++k) {
    const double sx = std::sqrt(out.input_variance[k]);
    const double sv = std::sqrt((1.0 - spec.rho * spec.rho) * out.input_variance[k]);
    const double sz = std::sqrt(out.noise_variance[k]);
    const Vector w = out.W_star.col(k);

    TaskDataset task;
    task.task_id = static_cast<int>(k);
    task.X.resize(4, spec.samples_per_agent);
    task.y.resize(spec.samples_per_agent);
    double y1 = 0.0, y2 = 0.0;  // linear state at i-1, i-2
    double d1 = 0.0, d2 = 0.0;  // observed output at i-1, i-2
    for (Index i = 0; i < total; ++i) {
      const double x2 = sx * normal(rng);
      const double x1 = spec.rho * x2 + sv * normal(rng);
      const double y = w[0] * x1 + w[1] * x2 - 0.2 * y1 + 0.35 * y2;
      const double d = wiener_nonlinearity(y) + sz * normal(rng);
      if (i >= spec.burn_in) {
        const Index col = i - spec.burn_in;
        task.X.col(col) << x1, x2, d1, d2;
        task.y[col] = d;
      }
      y2 = y1;
      y1 = y;
      d2 = d1;
      d1 = d;
    }
    out.tasks.push_back(std::move(task));
  }
  return out;
}

// CSV

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw InvalidInput("row " + std::to_string(row) + ", column '" + column +
                       "': '" + cell + "' is not a finite number");
  }
  return value;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InvalidInput("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<TaskDataset> parse_csv_tasks(const std::string& text, const CsvSchema& schema) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("CSV is empty; a header row is required");
  const std::vector<std::string> header = split_row(line);

  const std::size_t task_col = column_index(header, schema.task_column);
  const std::size_t target_col = column_index(header, schema.target_column);
  std::vector<std::size_t> feature_cols;
  if (schema.feature_columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != task_col && c != target_col) feature_cols.push_back(c);
    }
  } else {
    for (const auto& name : schema.feature_columns) feature_cols.push_back(column_index(header, name));
  }
  if (feature_cols.empty()) throw InvalidInput("no feature columns");

  std::vector<int> order;
  std::map<int, std::vector<std::pair<Vector, double>>> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw InvalidInput("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                         " cells, header has " + std::to_string(header.size()));
    }
    const double task_value = parse_number(cells[task_col], row, header[task_col]);
    if (task_value != std::floor(task_value) || std::abs(task_value) > 2e9) {
      throw InvalidInput("row " + std::to_string(row) + ": task id must be an integer");
    }
    const int task_id = static_cast<int>(task_value);
    Vector x(static_cast<Index>(feature_cols.size()));
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      x[static_cast<Index>(f)] = parse_number(cells[feature_cols[f]], row, header[feature_cols[f]]);
    }
    const double y = parse_number(cells[target_col], row, header[target_col]);
    auto& bucket = rows[task_id];
    if (bucket.empty()) order.push_back(task_id);
    bucket.emplace_back(std::move(x), y);
  }
  if (order.empty()) throw InvalidInput("CSV has no data rows");

  std::vector<TaskDataset> tasks;
  for (int id : order) {
    const auto& bucket = rows[id];
    TaskDataset task;
    task.task_id = id;
    task.X.resize(static_cast<Index>(feature_cols.size()), static_cast<Index>(bucket.size()));
    task.y.resize(static_cast<Index>(bucket.size()));
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      task.X.col(static_cast<Index>(i)) = bucket[i].first;
      task.y[static_cast<Index>(i)] = bucket[i].second;
    }
    tasks.push_back(std::move(task));
  }
  if (schema.standardize || schema.standardize_target) {
    Standardizer s = Standardizer::fit(tasks, schema.standardize_target);
    if (!schema.standardize) {
      s.feature_mean.setZero();
      s.feature_scale.setOnes();
    }
    tasks = s.apply(tasks);
  }
  return tasks;
}

std::vector<TaskDataset> load_csv_tasks(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv_tasks(buffer.str(), schema);
}

std::string format_csv_tasks(const std::vector<TaskDataset>& tasks) {
  const Index d = validate_tasks(tasks, /*allow_empty=*/true);
  std::string out = "task,y";
  for (Index k = 0; k < d; ++k) out += ",x" + std::to_string(k);
  out += '\n';
  for (const auto& task : tasks) {
    for (Index i = 0; i < task.y.size(); ++i) {
      out += std::to_string(task.task_id);
      out += ',';
      out += format_double(task.y[i]);
      for (Index k = 0; k < d; ++k) {
        out += ',';
        out += format_double(task.X(k, i));
      }
      out += '\n';
    }
  }
  return out;
}

void write_csv_tasks(const std::string& path, const std::vector<TaskDataset>& tasks) {
  const std::string text = format_csv_tasks(tasks);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<TaskDataset> read_csv_tasks(const std::string& path) {
  return load_csv_tasks(path, CsvSchema{"task", "y", {}, false, false});
}

Standardizer Standardizer::fit(const std::vector<TaskDataset>& tasks, bool standardize_target) {
  const Index d = validate_tasks(tasks, /*allow_empty=*/true);
  Standardizer s;
  s.targets = standardize_target;
  s.feature_mean = Vector::Zero(d);
  Vector sq = Vector::Zero(d);
  double y_sum = 0.0, y_sq = 0.0;
  Index n = 0;
  for (const auto& task : tasks) {
    s.feature_mean += task.X.rowwise().sum();
    y_sum += task.y.sum();
    n += task.y.size();
  }
  if (n == 0) throw InvalidInput("cannot standardize without samples");
  s.feature_mean /= static_cast<double>(n);
  s.target_mean = y_sum / static_cast<double>(n);
  for (const auto& task : tasks) {
    sq += (task.X.colwise() - s.feature_mean).rowwise().squaredNorm();
    y_sq += (task.y.array() - s.target_mean).square().sum();
  }
  s.feature_scale = (sq / static_cast<double>(n)).cwiseSqrt();
  for (Index k = 0; k < d; ++k) {
    if (!(s.feature_scale[k] > 0.0)) s.feature_scale[k] = 1.0;
  }
  s.target_scale = std::sqrt(y_sq / static_cast<double>(n));
  if (!(s.target_scale > 0.0)) s.target_scale = 1.0;
  if (!standardize_target) {
    s.target_mean = 0.0;
    s.target_scale = 1.0;
  }
  return s;
}

std::vector<TaskDataset> Standardizer::apply(const std::vector<TaskDataset>& tasks) const {
  std::vector<TaskDataset> out;
  out.reserve(tasks.size());
  for (const auto& task : tasks) {
    if (task.X.rows() != feature_mean.size()) {
      throw InvalidInput("standardizer fitted on a different feature dimension");
    }
    TaskDataset t;
    t.task_id = task.task_id;
    t.X = (task.X.colwise() - feature_mean).array().colwise() / feature_scale.array();
    t.y = (task.y.array() - target_mean) / target_scale;
    out.push_back(std::move(t));
  }
  return out;
}

TrainTestSplit train_test_split(const std::vector<TaskDataset>& tasks, double ratio,
                                std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidInput("split ratio must lie in (0, 1)");
  validate_tasks(tasks);
  Rng rng(derive_seed(seed, streams::kSplit));
  TrainTestSplit split;
  for (const auto& task : tasks) {
    const Index n = task.y.size();
    if (n < 2) {
      throw InvalidInput("task " + std::to_string(task.task_id) +
                         " needs at least two samples to split");
    }
    // The small offset keeps products like 0.3 * 10 from rounding up.
    Index n_train = static_cast<Index>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
    n_train = std::clamp<Index>(n_train, 1, n - 1);

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Index> train_idx(order.begin(), order.begin() + n_train);
    std::vector<Index> test_idx(order.begin() + n_train, order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    auto gather = [&task](const std::vector<Index>& idx) {
      TaskDataset t;
      t.task_id = task.task_id;
      t.X.resize(task.X.rows(), static_cast<Index>(idx.size()));
      t.y.resize(static_cast<Index>(idx.size()));
      for (std::size_t c = 0; c < idx.size(); ++c) {
        t.X.col(static_cast<Index>(c)) = task.X.col(idx[c]);
        t.y[static_cast<Index>(c)] = task.y[idx[c]];
      }
      return t;
    };
    split.train.push_back(gather(train_idx));
    split.test.push_back(gather(test_idx));
  }
  return split;
}

}  // namespace gamtl
