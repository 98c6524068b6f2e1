#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace multinet {

/// Writes the bundled synthetic multiplex (33 nodes, 10 layers, 9 periods)
/// as manifest.json, nodes.csv and matrices/ under `dir`. Output depends
/// only on the fixed seed.
void write_demo(const std::filesystem::path& dir);

/// Node ids of the mutual block planted in the Equity and NOx layers; the
/// Equity:NOx reverse backbone of the time average is exactly this set.
const std::vector<std::string>& demo_planted_hubs();

}  // namespace multinet
