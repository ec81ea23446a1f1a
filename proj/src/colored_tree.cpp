#include "lobtree/colored_tree.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lobtree/format.hpp"

namespace lobtree {

const char* to_string(Color c) {
  switch (c) {
    case Color::white: return "white";
    case Color::green: return "green";
    case Color::red: return "red";
  }
  return "?";
}

ColoredTree::ColoredTree(Color root_color, double root_label, std::uint64_t root_key) {
  TreeNode root;
  root.label = root_label;
  root.key = root_key;
  nodes_.push_back(std::move(root));
  nodes_[0].color = Color::white;
  set_color(0, root_color);
}

NodeId ColoredTree::add_child(NodeId parent, double edge, Color c) {
  const auto& siblings = nodes_[parent].children;
  const std::uint32_t rank = siblings.empty() ? 0 : nodes_[siblings.back()].rank + 1;
  return add_child_with_rank(parent, rank, edge, c);
}

NodeId ColoredTree::add_child_with_rank(NodeId parent, std::uint32_t rank, double edge, Color c) {
  if (parent >= nodes_.size()) throw std::out_of_range("add_child: no such parent");
  const auto& siblings = nodes_[parent].children;
  if (!siblings.empty() && nodes_[siblings.back()].rank >= rank) {
    throw std::invalid_argument("add_child: ranks must increase");
  }
  const auto id = static_cast<NodeId>(nodes_.size());
  TreeNode n;
  n.parent = parent;
  n.rank = rank;
  n.depth = nodes_[parent].depth + 1;
  n.edge = edge;
  n.label = nodes_[parent].label + edge;
  n.key = 0;
  nodes_.push_back(std::move(n));
  nodes_[parent].children.push_back(id);
  set_color(id, c);
  return id;
}

void ColoredTree::set_color(NodeId v, Color c) {
  auto& node = nodes_[v];
  if (node.color == Color::green) --greens_;
  if (node.color == Color::red) --reds_;
  node.color = c;
  if (c == Color::green) ++greens_;
  if (c == Color::red) ++reds_;
}

void ColoredTree::shift(double delta) {
  nodes_[0].label += delta;
  // Parents precede children in the arena, so one forward pass suffices.
  for (std::size_t v = 1; v < nodes_.size(); ++v) {
    nodes_[v].label = nodes_[nodes_[v].parent].label + nodes_[v].edge;
  }
}

std::vector<NodeId> ColoredTree::preorder() const {
  std::vector<NodeId> order;
  order.reserve(nodes_.size());
  std::vector<NodeId> stack{0};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto& ch = nodes_[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

bool operator==(const ColoredTree& a, const ColoredTree& b) {
  if (a.size() != b.size() || a.greens_ != b.greens_ || a.reds_ != b.reds_) return false;
  if (a.nodes_[0].label != b.nodes_[0].label || a.nodes_[0].color != b.nodes_[0].color) return false;
  std::vector<std::pair<NodeId, NodeId>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [u, v] = stack.back();
    stack.pop_back();
    const auto& cu = a.nodes_[u].children;
    const auto& cv = b.nodes_[v].children;
    if (cu.size() != cv.size()) return false;
    for (std::size_t i = 0; i < cu.size(); ++i) {
      const auto& x = a.nodes_[cu[i]];
      const auto& y = b.nodes_[cv[i]];
      if (x.rank != y.rank || x.edge != y.edge || x.color != y.color) return false;
      stack.emplace_back(cu[i], cv[i]);
    }
  }
  return true;
}

void write_snapshot(std::ostream& os, const ColoredTree& t) {
  const auto order = t.preorder();
  std::vector<long> position(t.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = static_cast<long>(i);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& n = t.node(order[i]);
    const long parent = n.parent == kNoNode ? -1 : position[n.parent];
    const double edge = n.parent == kNoNode ? n.label : n.edge;
    os << i << ' ' << parent << ' ' << format_real(edge) << ' ' << to_string(n.color) << '\n';
  }
}

namespace {

Color parse_color(const std::string& s) {
  if (s == "white") return Color::white;
  if (s == "green") return Color::green;
  if (s == "red") return Color::red;
  throw std::invalid_argument("snapshot: unknown color '" + s + "'");
}

}  // namespace

ColoredTree read_snapshot(std::istream& is) {
  std::string line;
  std::vector<NodeId> ids;
  ColoredTree t;
  bool have_root = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    long id = 0, parent = 0;
    std::string edge_text, color_text;
    if (!(ls >> id >> parent >> edge_text >> color_text)) {
      throw std::invalid_argument("snapshot: malformed line '" + line + "'");
    }
    const double edge = std::stod(edge_text);
    if (id != static_cast<long>(ids.size())) throw std::invalid_argument("snapshot: ids must be 0,1,...");
    if (!have_root) {
      if (parent != -1) throw std::invalid_argument("snapshot: first line must be the root");
      t = ColoredTree(parse_color(color_text), edge);
      ids.push_back(t.root());
      have_root = true;
      continue;
    }
    if (parent < 0 || parent >= id) throw std::invalid_argument("snapshot: parent must precede child");
    ids.push_back(t.add_child(ids[static_cast<std::size_t>(parent)], edge, parse_color(color_text)));
  }
  if (!have_root) throw std::invalid_argument("snapshot: empty");
  return t;
}

}  // namespace lobtree
