/*
              __ __ __
             |__|__|  | __
             |  |  |  ||__|
  ___ ___ __ |  |  |  |
 |   |   |  ||  |  |  |    Ubiquitous Internet @ IIT-CNR
 |   |   |  ||  |  |  |    C++ edge computing libraries and tools
 |_______|__||__|__|__|    https://github.com/ccicconetti/serverlessonedge

Licensed under the MIT License <http://opensource.org/licenses/MIT>
Copyright (c) 2022 C. Cicconetti <https://ccicconetti.github.io/>

Permission is hereby  granted, free of charge, to any  person obtaining a copy
of this software and associated  documentation files (the "Software"), to deal
in the Software  without restriction, including without  limitation the rights
to  use, copy,  modify, merge,  publish, distribute,  sublicense, and/or  sell
copies  of  the Software,  and  to  permit persons  to  whom  the Software  is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE  IS PROVIDED "AS  IS", WITHOUT WARRANTY  OF ANY KIND,  EXPRESS OR
IMPLIED,  INCLUDING BUT  NOT  LIMITED TO  THE  WARRANTIES OF  MERCHANTABILITY,
FITNESS FOR  A PARTICULAR PURPOSE AND  NONINFRINGEMENT. IN NO EVENT  SHALL THE
AUTHORS  OR COPYRIGHT  HOLDERS  BE  LIABLE FOR  ANY  CLAIM,  DAMAGES OR  OTHER
LIABILITY, WHETHER IN AN ACTION OF  CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE  OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace uiiit {
namespace qkdedge {

//! Dense index of a QKD node, in [0, N).
using NodeId = std::uint32_t;

//! Sequence of nodes, from the first to the last one.
using Path = std::vector<NodeId>;

//! Additive tolerance used on all comparisons between capacities.
inline constexpr double kTolerance = 1e-9;

/**
 * Undirected QKD link with a secret-key rate, in b/s.
 *
 * The endpoints are stored so that theA < theB.
 */
struct QkdLink {
  NodeId theA   = 0;
  NodeId theB   = 0;
  double theSkr = 0;

  bool operator==(const QkdLink&) const = default;
};

//! Processing facility co-located with a QKD node.
struct EdgeNode {
  NodeId theLocation = 0;
  double theCpu      = 0;

  bool operator==(const EdgeNode&) const = default;
};

/**
 * Immutable graph of QKD nodes and links plus the edge nodes.
 *
 * Links are kept sorted by endpoints, edge nodes by location: the position
 * of a link (edge node) in the respective vector is its index, used
 * throughout to address residual capacities.
 */
class QkdTopology
{
 public:
  struct Adjacent {
    NodeId      theNode;
    std::size_t theLink;
  };

  /**
   * \throw std::invalid_argument if any invariant is violated, with a
   * message naming it.
   */
  QkdTopology(std::size_t           aNumNodes,
              std::vector<QkdLink>  aLinks,
              std::vector<EdgeNode> aEdges)
      : theNumNodes(aNumNodes)
      , theLinks(std::move(aLinks))
      , theEdges(std::move(aEdges))
      , theAdjacency(aNumNodes)
      , theEdgeIndex(aNumNodes, kNone) {
    if (theNumNodes == 0) {
      fail("no nodes");
    }
    for (auto& myLink : theLinks) {
      if (myLink.theA >= theNumNodes or myLink.theB >= theNumNodes) {
        fail("link endpoint " +
             std::to_string(std::max(myLink.theA, myLink.theB)) +
             " is not a node");
      }
      if (myLink.theA == myLink.theB) {
        fail("self-loop on node " + std::to_string(myLink.theA));
      }
      if (not std::isfinite(myLink.theSkr) or myLink.theSkr < 0) {
        fail("link " + std::to_string(myLink.theA) + "-" +
             std::to_string(myLink.theB) +
             " has a negative or non-finite secret-key rate");
      }
      if (myLink.theA > myLink.theB) {
        std::swap(myLink.theA, myLink.theB);
      }
    }
    std::sort(theLinks.begin(),
              theLinks.end(),
              [](const auto& lhs, const auto& rhs) {
                return std::tie(lhs.theA, lhs.theB) <
                       std::tie(rhs.theA, rhs.theB);
              });
    for (std::size_t i = 1; i < theLinks.size(); i++) {
      if (theLinks[i].theA == theLinks[i - 1].theA and
          theLinks[i].theB == theLinks[i - 1].theB) {
        fail("multiple links between nodes " +
             std::to_string(theLinks[i].theA) + " and " +
             std::to_string(theLinks[i].theB));
      }
    }

    if (theEdges.empty()) {
      fail("no edge nodes");
    }
    std::sort(theEdges.begin(),
              theEdges.end(),
              [](const auto& lhs, const auto& rhs) {
                return lhs.theLocation < rhs.theLocation;
              });
    for (std::size_t i = 0; i < theEdges.size(); i++) {
      const auto& myEdge = theEdges[i];
      if (myEdge.theLocation >= theNumNodes) {
        fail("edge node location " + std::to_string(myEdge.theLocation) +
             " is not a node");
      }
      if (theEdgeIndex[myEdge.theLocation] != kNone) {
        fail("multiple edge nodes at node " +
             std::to_string(myEdge.theLocation));
      }
      if (not std::isfinite(myEdge.theCpu) or myEdge.theCpu < 0) {
        fail("edge node at " + std::to_string(myEdge.theLocation) +
             " has a negative or non-finite capacity");
      }
      theEdgeIndex[myEdge.theLocation] = i;
    }

    for (std::size_t i = 0; i < theLinks.size(); i++) {
      theAdjacency[theLinks[i].theA].push_back({theLinks[i].theB, i});
      theAdjacency[theLinks[i].theB].push_back({theLinks[i].theA, i});
    }
    for (auto& myList : theAdjacency) {
      std::sort(myList.begin(), myList.end(), [](const auto& l, const auto& r) {
        return l.theNode < r.theNode;
      });
    }
  }

  std::size_t numNodes() const noexcept {
    return theNumNodes;
  }
  const std::vector<QkdLink>& links() const noexcept {
    return theLinks;
  }
  const std::vector<EdgeNode>& edges() const noexcept {
    return theEdges;
  }
  bool hasNode(const NodeId aNode) const noexcept {
    return aNode < theNumNodes;
  }

  //! Neighbours of aNode sorted by increasing NodeId.
  std::span<const Adjacent> neighbours(const NodeId aNode) const {
    checkNode(aNode);
    return theAdjacency[aNode];
  }

  std::optional<std::size_t> linkIndex(const NodeId aFrom,
                                       const NodeId aTo) const {
    if (not hasNode(aFrom) or not hasNode(aTo)) {
      return std::nullopt;
    }
    const auto& myList = theAdjacency[aFrom];
    const auto  it     = std::lower_bound(
        myList.begin(), myList.end(), aTo, [](const auto& aAdj, NodeId aId) {
          return aAdj.theNode < aId;
        });
    if (it == myList.end() or it->theNode != aTo) {
      return std::nullopt;
    }
    return it->theLink;
  }

  std::optional<std::size_t> edgeIndex(const NodeId aLocation) const noexcept {
    if (not hasNode(aLocation) or theEdgeIndex[aLocation] == kNone) {
      return std::nullopt;
    }
    return theEdgeIndex[aLocation];
  }

  double totalSkr() const noexcept {
    double ret = 0;
    for (const auto& myLink : theLinks) {
      ret += myLink.theSkr;
    }
    return ret;
  }

  double totalCpu() const noexcept {
    double ret = 0;
    for (const auto& myEdge : theEdges) {
      ret += myEdge.theCpu;
    }
    return ret;
  }

  bool connected() const {
    std::vector<bool>  myVisited(theNumNodes, false);
    std::queue<NodeId> myQueue;
    myQueue.push(0);
    myVisited[0]      = true;
    std::size_t count = 1;
    while (not myQueue.empty()) {
      const auto myCur = myQueue.front();
      myQueue.pop();
      for (const auto& myAdj : theAdjacency[myCur]) {
        if (not myVisited[myAdj.theNode]) {
          myVisited[myAdj.theNode] = true;
          ++count;
          myQueue.push(myAdj.theNode);
        }
      }
    }
    return count == theNumNodes;
  }

  //! Copy with all link rates and edge capacities multiplied by the factors.
  QkdTopology scaled(const double aSkrFactor, const double aCpuFactor) const {
    auto myLinks = theLinks;
    for (auto& myLink : myLinks) {
      myLink.theSkr *= aSkrFactor;
    }
    auto myEdges = theEdges;
    for (auto& myEdge : myEdges) {
      myEdge.theCpu *= aCpuFactor;
    }
    return QkdTopology(theNumNodes, std::move(myLinks), std::move(myEdges));
  }

  std::string toString() const {
    std::stringstream ret;
    ret << theNumNodes << " nodes, " << theLinks.size() << " links (total "
        << totalSkr() << " b/s), " << theEdges.size() << " edge nodes (total "
        << totalCpu() << " cpu)";
    return ret.str();
  }

  bool operator==(const QkdTopology& aOther) const noexcept {
    return theNumNodes == aOther.theNumNodes and theLinks == aOther.theLinks and
           theEdges == aOther.theEdges;
  }

  void checkNode(const NodeId aNode) const {
    if (not hasNode(aNode)) {
      throw std::invalid_argument("unknown node " + std::to_string(aNode));
    }
  }

 private:
  [[noreturn]] static void fail(const std::string& aWhat) {
    throw std::invalid_argument("invalid topology: " + aWhat);
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::size_t                        theNumNodes;
  std::vector<QkdLink>               theLinks;
  std::vector<EdgeNode>              theEdges;
  std::vector<std::vector<Adjacent>> theAdjacency;
  std::vector<std::size_t>           theEdgeIndex;
};

} // namespace qkdedge
} // namespace uiiit
