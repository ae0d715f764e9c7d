#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stba/error.hpp"
#include "stba/oracle.hpp"

namespace stba {

enum class Activation { relu, identity, softmax };

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;     // out
  Activation activation = Activation::identity;
};

struct ModelSpec {
  Shape input_shape;
  std::size_t num_classes = 0;
  std::vector<DenseLayer> layers;
};

/// Schema or dimension violation in a weights document. `path()` is a JSON
/// pointer to the offending element.
class ModelSpecError : public FormatError {
 public:
  ModelSpecError(std::string path, const std::string& message)
      : FormatError(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Parses and validates the weights JSON document:
/// {"input_shape":[C,H,W],"num_classes":N,"layers":[{"weights":[[..]],"bias":[..],"activation":".."}]}
ModelSpec load_model_spec(std::string_view json);
ModelSpec load_model_spec_file(const std::string& path);
std::string model_spec_to_json(const ModelSpec& spec);

/// Throws ModelSpecError if dimensions do not chain or softmax is not last.
void validate(const ModelSpec& spec);

/// In-process feed-forward scorer. Immutable after construction and safe for
/// concurrent readers.
class MlpModel final : public Oracle {
 public:
  explicit MlpModel(ModelSpec spec);

  const OracleInfo& info() const override { return info_; }
  ScoreVector predict(const Image& img) const override;
  bool concurrent_safe() const override { return true; }

  const ModelSpec& spec() const { return spec_; }

 private:
  ModelSpec spec_;
  OracleInfo info_;
};

}  // namespace stba
