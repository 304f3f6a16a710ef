#pragma once

#include <iosfwd>
#include <string>

#include "tgp/graph.hpp"

namespace tgp {

// Graph text format: header `N M F [L]`, then M lines `src dst weight`,
// then N lines of F feature reals, then (if L != 0) N label lines.
// `#` starts a comment; tokens are whitespace-delimited.

Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);

void write_graph(std::ostream& out, const Graph& g);
void write_graph_file(const std::string& path, const Graph& g);

}  // namespace tgp
