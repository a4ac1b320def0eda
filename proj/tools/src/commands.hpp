#pragma once

#include <iosfwd>

#include "config.hpp"

namespace acdma::cli {

void cmd_efficiency(const ExperimentConfig& config, std::ostream& out, std::ostream& log);
void cmd_capacity(const ExperimentConfig& config, std::ostream& out, std::ostream& log);
void cmd_figure2(const ExperimentConfig& config, std::ostream& out, std::ostream& log);
void cmd_figure3(const ExperimentConfig& config, std::ostream& out, std::ostream& log);
void cmd_montecarlo(const ExperimentConfig& config, std::ostream& out, std::ostream& log);
void cmd_theorem3(const ExperimentConfig& config, std::ostream& out, std::ostream& log);
/// Returns true when every hard property passes.
bool cmd_verify(const ExperimentConfig& config, std::ostream& out, std::ostream& log);

/// "# acdma <command>" followed by the resolved configuration as comments.
void write_header(std::ostream& out, const ExperimentConfig& config);

} // namespace acdma::cli
