#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "beamspec/analysis.hpp"
#include "beamspec/continuation.hpp"
#include "beamspec/nodal.hpp"
#include "beamspec/spectrum.hpp"

namespace beamspec {

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a; rendered as 16 lowercase hex digits by checksum_hex.
std::uint64_t fnv1a64(std::string_view bytes);
std::string checksum_hex(std::string_view bytes);

/// %.17g
std::string format_double(double v);

Json profile_json(const NodalProfile& p);
/// phi_ref maps a pair to the relative path of its eigenfunction CSV.
Json spectrum_json(const SpectrumResult& s, const std::function<std::string(const EigenPair&)>& phi_ref);
Json parity_json(const ParityReport& r);
Json sturm_json(const SturmSuiteReport& r);
Json divergence_json(const DivergenceReport& r);
Json spacing_json(const SpacingReport& r);

/// Header "step,arclength,mu,enorm,count,sigma", one row per point.
std::string branch_csv(const Branch& b);

/// (mu, e_norm) polylines, one color per (k, nu, sigma), bifurcation points on the mu axis.
std::string render_diagram(const std::vector<Branch>& branches);

/// Writes files below a root directory and records their checksums for manifest.json.
class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  /// Relative path with forward slashes; parent directories are created.
  void write(const std::string& relative, std::string_view content);
  /// manifest.json: {"inputs": ..., "outputs": [{"path", "bytes", "fnv1a64"}]} sorted by path.
  void write_manifest(const Json& inputs, const std::string& version);

 private:
  struct Entry {
    std::string path;
    std::size_t bytes;
    std::string checksum;
  };
  std::filesystem::path root_;
  std::vector<Entry> entries_;
};

}  // namespace beamspec
