#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swarmsearch/engine.hpp"
#include "swarmsearch/experiments.hpp"

namespace swarm {

/// Parsed configuration file: a single instance or a sweep.
using ParsedConfig = std::variant<SimConfig, SweepSpec>;

/// Parses `key = value` text. '#' starts a comment. Any `axis.<name>` or
/// `replicates` key makes the result a SweepSpec. A seed must be present in the
/// text unless seed_override is given, which wins over the text. Empty text
/// (nothing but comments) gives the defaults with seed 0.
[[nodiscard]] ParsedConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override = {});
[[nodiscard]] SimConfig parse_sim_config(std::string_view text, std::optional<std::uint64_t> seed_override = {});
[[nodiscard]] SweepSpec parse_sweep_spec(std::string_view text, std::optional<std::uint64_t> seed_override = {});

/// Text that parse_config maps back to an equal value.
[[nodiscard]] std::string serialize_config(const SimConfig& config);
[[nodiscard]] std::string serialize_sweep(const SweepSpec& spec);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Summary table, one row per instance, written as CSV.
[[nodiscard]] std::string summary_csv(const SweepResult& result);
/// Structured twin of the summary; reloads to an equal SweepResult.
[[nodiscard]] std::string summary_json(const SweepResult& result);
[[nodiscard]] SweepResult parse_summary_json(std::string_view text);

/// Writes <path> (CSV) and <path with .json extension>. Returns both paths.
std::vector<std::filesystem::path> write_summary(const SweepResult& result, const std::filesystem::path& path);
[[nodiscard]] SweepResult read_summary_json(const std::filesystem::path& path);

/// Frame dump of a run recorded with record_trajectory.
[[nodiscard]] std::string frames_text(const EventLog& log);
void write_frames(const EventLog& log, const std::filesystem::path& path);
/// Frame records parsed back from frames_text output.
[[nodiscard]] std::vector<FrameRecord> parse_frames(std::string_view text);

[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);
[[nodiscard]] std::string hex64(std::uint64_t value);

struct ManifestEntry {
    std::string path;  ///< relative to the manifest directory
    std::string checksum;
    std::uint64_t bytes = 0;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct RunManifest {
    std::string spec_checksum;
    std::string code_version;
    std::uint64_t base_seed = 0;
    std::string timestamp;  ///< UTC, ISO 8601
    std::string command;
    std::vector<ManifestEntry> outputs;

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

[[nodiscard]] std::string code_version();
[[nodiscard]] std::string utc_timestamp();

/// Checksums the listed files (paths as opened, inside dir) into a manifest;
/// entries record them relative to dir.
[[nodiscard]] RunManifest make_manifest(const std::filesystem::path& dir, std::string_view spec_text,
                                        std::uint64_t base_seed, std::string command,
                                        const std::vector<std::filesystem::path>& outputs);
[[nodiscard]] std::string manifest_json(const RunManifest& manifest);
[[nodiscard]] RunManifest parse_manifest_json(std::string_view text);
/// Writes dir/manifest.json.
std::filesystem::path write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
[[nodiscard]] RunManifest read_manifest(const std::filesystem::path& dir);
/// Paths whose current checksum differs from the manifest (missing files included).
[[nodiscard]] std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

}  // namespace swarm
