#pragma once

#include <string>

namespace hmmvae::exp {

// Renders loss.svg, sources.svg, states.svg, and transitions.svg into `dir`
// from the CSV files already present there. Each plot is a deterministic pure
// function of its CSV; plots whose CSV is missing are skipped.
void render_plots(const std::string& dir);

}  // namespace hmmvae::exp
