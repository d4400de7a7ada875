#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "commlab/script/interpreter.hpp"

namespace commlab::cli {

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    bool json = false;
};

// Each command writes to out/err and returns the process exit code.
int cmd_validate(const std::filesystem::path& course_dir, const CommonFlags& f, std::ostream& out, std::ostream& err);
int cmd_run(const std::filesystem::path& task_file, const std::filesystem::path& script_file, const CommonFlags& f,
            std::ostream& out, std::ostream& err);
int cmd_check(const std::filesystem::path& task_file, const std::filesystem::path& script_file, const CommonFlags& f,
              std::ostream& out, std::ostream& err);
int cmd_serve(const std::filesystem::path& config_file, std::ostream& out, std::ostream& err);

/// Plain-text figure dump: one block per curve with a label line, an x row and a y row.
std::string dump_figures(const std::vector<script::FigureData>& figs);
std::string dump_workspace(const script::Workspace& ws);

/// Full command line entry point (argv[0] included).
int main_entry(int argc, char** argv);

}  // namespace commlab::cli
