#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace drr {

struct LabeledDataset {
  Eigen::MatrixXd features;  // N x p
  Eigen::VectorXd labels;    // +-1
  int n_samples() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

// Two Gaussian clusters at +-separation * e1, unit covariance, alternating
// labels. Deterministic in seed.
LabeledDataset synth_classification(int n_samples, int dim, double separation,
                                    std::uint64_t seed);

// CSV rows = feature columns then label as last column. Labels in {-1, +1};
// {0, 1} are remapped to {-1, +1}. Ragged or malformed rows are an error
// naming the 1-based line.
LabeledDataset load_csv(const std::string& path);

// Sample-to-agent assignment plus each agent's mini-batch index lists.
struct Partition {
  int n = 0, m = 0;
  std::vector<int> assignment;                       // sample -> agent
  std::vector<std::vector<std::vector<int>>> batches;  // [agent][batch] -> sample indices
};

// Label-sorted contiguous split: stable-sorts samples by label and deals them
// to agents in contiguous blocks (sizes differ by at most one), so agents end
// up with disjoint label ranges. Each agent's block is then cut into m
// contiguous mini-batches, sizes differing by at most one, all nonempty.
// Requires n_samples >= n*m.
Partition heterogeneous_partition(const LabeledDataset& data, int n, int m);

std::string partition_to_json(const Partition& part);

}  // namespace drr
