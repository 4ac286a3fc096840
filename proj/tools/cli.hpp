#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace dumbbell::cli {

/// Entry point of the `dumbbell` tool. `args` excludes the program name.
/// Returns the process exit code; normal output goes to `out`, diagnostics
/// to `err`.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Rewrites the two-letter short options of the original tools (-q1, -q2,
/// -f1, -f2, -f3) into their long forms.
std::vector<std::string> normalize_arguments(std::vector<std::string> args);

/// File roles used by `clean`.
enum class FileRole { sender, receiver, mutual };

/// Extensions `clean` may delete: pcap, json, svg, png, log.
bool is_cleanable(const std::filesystem::path& file);

/// sender: *-sender.pcap and trace-*.log; receiver: *-receiver.pcap;
/// mutual: everything else (metadata, data logs, plots, stats).
FileRole classify_file(const std::filesystem::path& file);

}  // namespace dumbbell::cli
