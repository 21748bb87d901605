#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <variant>

#include "waferbench/lstm.hpp"
#include "waferbench/nn.hpp"

namespace waferbench {

struct DenseModel {
    NetworkSpec spec;
    Parameters params;

    bool operator==(const DenseModel&) const = default;
};

struct LstmModel {
    LstmConfig config;
    LstmParams params;

    bool operator==(const LstmModel&) const = default;
};

using Model = std::variant<DenseModel, LstmModel>;

// Versioned text container:
//
//   waferbench-checkpoint 1
//   kind dense|lstm
//   <topology lines>
//   tensor <name> <rows> <cols>
//   <rows lines of cols values, %.17g>
//   ...
//   end
//
// Values print with 17 significant digits, so a reload is bit-exact and the
// bytes depend only on the parameters.
inline constexpr int checkpoint_version = 1;

void save_checkpoint(std::ostream& out, const Model& model);
void save_checkpoint(const std::filesystem::path& path, const Model& model);
Model load_checkpoint(std::istream& in);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace waferbench
