#include "drr/data.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "drr/rng.hpp"

namespace drr {

LabeledDataset synth_classification(int n_samples, int dim, double separation,
                                    std::uint64_t seed) {
  if (n_samples < 2 || dim < 1)
    throw std::invalid_argument("synth_classification: need n_samples >= 2, dim >= 1");
  LabeledDataset d;
  d.features.resize(n_samples, dim);
  d.labels.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    rng::Stream s(rng::derive(seed, rng::kTagProblem, static_cast<std::uint64_t>(i)));
    const double y = (i % 2 == 0) ? 1.0 : -1.0;
    d.labels(i) = y;
    for (int q = 0; q < dim; ++q) d.features(i, q) = s.next_gaussian();
    d.features(i, 0) += y * separation;
  }
  return d;
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
  std::string line;
  int lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::invalid_argument("load_csv: bad number at line " + std::to_string(lineno));
      }
    }
    if (row.size() < 2)
      throw std::invalid_argument("load_csv: need at least one feature and a label at line " +
                                  std::to_string(lineno));
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw std::invalid_argument("load_csv: ragged row at line " + std::to_string(lineno));
    rows.push_back(std::move(row));
    row_lines.push_back(lineno);
  }
  if (rows.empty()) throw std::invalid_argument("load_csv: empty file " + path);

  LabeledDataset d;
  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(width) - 1;
  d.features.resize(n, p);
  d.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int q = 0; q < p; ++q) d.features(i, q) = rows[i][q];
    double y = rows[i][p];
    if (y == 0.0) y = -1.0;  // {0,1} convention
    if (y != 1.0 && y != -1.0)
      throw std::invalid_argument("load_csv: label must be in {-1,0,1} at line " +
                                  std::to_string(row_lines[i]));
    d.labels(i) = y;
  }
  return d;
}

Partition heterogeneous_partition(const LabeledDataset& data, int n, int m) {
  const int N = data.n_samples();
  if (n < 1 || m < 1) throw std::invalid_argument("partition: n, m must be >= 1");
  if (N < n * m)
    throw std::invalid_argument("partition: need n_samples >= n*m so every mini-batch is nonempty");

  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return data.labels(a) < data.labels(b); });

  Partition part;
  part.n = n;
  part.m = m;
  part.assignment.assign(N, -1);
  part.batches.assign(n, {});

  // contiguous blocks, sizes differing by at most one (first N%n get the extra)
  int cursor = 0;
  for (int i = 0; i < n; ++i) {
    const int size = N / n + (i < N % n ? 1 : 0);
    std::vector<int> mine(order.begin() + cursor, order.begin() + cursor + size);
    cursor += size;
    for (int s : mine) part.assignment[s] = i;

    part.batches[i].assign(m, {});
    int bc = 0;
    for (int l = 0; l < m; ++l) {
      const int bs = size / m + (l < size % m ? 1 : 0);
      part.batches[i][l].assign(mine.begin() + bc, mine.begin() + bc + bs);
      bc += bs;
    }
  }
  return part;
}

std::string partition_to_json(const Partition& part) {
  nlohmann::json j;
  j["n"] = part.n;
  j["m"] = part.m;
  j["assignment"] = part.assignment;
  j["batches"] = part.batches;
  return j.dump(2);
}

}  // namespace drr
