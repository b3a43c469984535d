#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcl/feature_space.hpp"

namespace mcl {

/// On-disk episode: raw shots per class (not yet averaged) plus the query.
///
/// Binary variant (little-endian):
///   "MCLE" | u16 version | u32 d | u32 r | u32 N | u32 K |
///   N*K shot matrices (class-major, shot-minor) | query matrix
/// each matrix being d*r float32 values, row-major (feature dimension i
/// outer, local feature j inner).
///
/// Text variant:
///   mcle-text <version>
///   dims <d> <r> <N> <K>
///   shot <c> <k>          followed by d lines of r numbers
///   ...
///   query                 followed by d lines of r numbers
/// Blank lines and lines starting with '#' are ignored.
struct EpisodeFile {
  std::size_t d = 0;
  std::size_t r = 0;
  std::vector<std::vector<FeatureMatrix>> shots;  // [class][shot]
  FeatureMatrix query;

  std::size_t n_classes() const noexcept { return shots.size(); }
  std::size_t k_shots() const noexcept { return shots.empty() ? 0 : shots.front().size(); }

  /// Averages shots into prototypes.
  Episode to_episode() const;
  /// Wraps an episode's prototypes as single shots (K = 1).
  static EpisodeFile from_episode(const Episode& episode);
};

enum class FileVariant { Text, Binary };

inline constexpr std::uint16_t kEpisodeFormatVersion = 1;
inline constexpr char kBinaryMagic[4] = {'M', 'C', 'L', 'E'};
inline constexpr const char* kTextMagic = "mcle-text";

/// Detects the variant from the leading bytes.
EpisodeFile read_episode_file(const std::filesystem::path& path);
Episode load_episode(const std::filesystem::path& path);

void save_episode_file(const EpisodeFile& file, const std::filesystem::path& path,
                       FileVariant variant);
void save_episode(const Episode& episode, const std::filesystem::path& path, FileVariant variant);

// In-memory forms; the path-based functions are thin wrappers around these.
EpisodeFile parse_episode_text(std::istream& in);
EpisodeFile parse_episode_binary(const std::string& bytes);
std::string serialize_episode_text(const EpisodeFile& file);
std::string serialize_episode_binary(const EpisodeFile& file);

}  // namespace mcl
