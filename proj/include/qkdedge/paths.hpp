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

#include "qkdedge/networkstate.hpp"
#include "qkdedge/request.hpp"
#include "qkdedge/topology.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

namespace uiiit {
namespace qkdedge {

//! Orders paths by number of hops, then lexicographically by node sequence.
struct PathLess {
  bool operator()(const Path& lhs, const Path& rhs) const noexcept {
    if (lhs.size() != rhs.size()) {
      return lhs.size() < rhs.size();
    }
    return lhs < rhs;
  }
};

//! Loopless paths between two nodes, sorted by PathLess.
struct PathSet {
  NodeId            theOrigin = 0;
  NodeId            theTarget = 0;
  std::vector<Path> thePaths;
};

namespace detail {

/**
 * Shortest path in hops from aFrom to aTo avoiding the nodes and links
 * marked as banned. Among the shortest ones, the lexicographically smallest
 * node sequence is returned.
 */
inline std::optional<Path> smallestShortestPath(const QkdTopology&       aTopology,
                                                const NodeId             aFrom,
                                                const NodeId             aTo,
                                                const std::vector<bool>& aBannedNodes,
                                                const std::vector<bool>& aBannedLinks) {
  constexpr auto kInf = std::numeric_limits<std::size_t>::max();

  // distances towards aTo, so that the forward walk can be greedy
  std::vector<std::size_t> myDist(aTopology.numNodes(), kInf);
  std::queue<NodeId>       myQueue;
  myDist[aTo] = 0;
  myQueue.push(aTo);
  while (not myQueue.empty() and myDist[aFrom] == kInf) {
    const auto myCur = myQueue.front();
    myQueue.pop();
    for (const auto& myAdj : aTopology.neighbours(myCur)) {
      if (aBannedLinks[myAdj.theLink] or aBannedNodes[myAdj.theNode] or
          myDist[myAdj.theNode] != kInf) {
        continue;
      }
      myDist[myAdj.theNode] = myDist[myCur] + 1;
      myQueue.push(myAdj.theNode);
    }
  }
  if (myDist[aFrom] == kInf) {
    return std::nullopt;
  }

  Path ret({aFrom});
  auto myCur = aFrom;
  while (myCur != aTo) {
    for (const auto& myAdj : aTopology.neighbours(myCur)) {
      if (not aBannedLinks[myAdj.theLink] and
          myDist[myAdj.theNode] + 1 == myDist[myCur]) {
        myCur = myAdj.theNode;
        break;
      }
    }
    ret.push_back(myCur);
  }
  return ret;
}

inline void allSimplePathsRecursive(const QkdTopology&     aTopology,
                                    const NodeId           aTarget,
                                    Path&                  aCurrent,
                                    std::vector<bool>&     aOnPath,
                                    std::vector<Path>&     aOut) {
  const auto myCur = aCurrent.back();
  if (myCur == aTarget) {
    aOut.push_back(aCurrent);
    return;
  }
  for (const auto& myAdj : aTopology.neighbours(myCur)) {
    if (aOnPath[myAdj.theNode]) {
      continue;
    }
    aOnPath[myAdj.theNode] = true;
    aCurrent.push_back(myAdj.theNode);
    allSimplePathsRecursive(aTopology, aTarget, aCurrent, aOnPath, aOut);
    aCurrent.pop_back();
    aOnPath[myAdj.theNode] = false;
  }
}

} // namespace detail

/**
 * The aK loopless paths from aOrigin to aTarget with fewest hops, ties
 * broken by lexicographic node sequence (Yen's algorithm).
 *
 * \throw std::invalid_argument if a node is unknown or aK is zero.
 */
inline PathSet kShortestPaths(const QkdTopology& aTopology,
                              const NodeId       aOrigin,
                              const NodeId       aTarget,
                              const std::size_t  aK) {
  aTopology.checkNode(aOrigin);
  aTopology.checkNode(aTarget);
  if (aK == 0) {
    throw std::invalid_argument("the number of paths must be positive");
  }

  PathSet ret{aOrigin, aTarget, {}};
  if (aOrigin == aTarget) {
    ret.thePaths.push_back(Path({aOrigin}));
    return ret;
  }

  const auto myNumNodes = aTopology.numNodes();
  const auto myNumLinks = aTopology.links().size();
  std::vector<bool> myBannedNodes(myNumNodes, false);
  std::vector<bool> myBannedLinks(myNumLinks, false);

  auto myFirst = detail::smallestShortestPath(
      aTopology, aOrigin, aTarget, myBannedNodes, myBannedLinks);
  if (not myFirst) {
    return ret;
  }
  auto& A = ret.thePaths;
  A.emplace_back(std::move(*myFirst));

  std::set<Path, PathLess> myTentative;
  while (A.size() < aK) {
    const auto myPrev = A.back();

    for (std::size_t i = 0; i + 1 < myPrev.size(); i++) {
      const auto mySpur = myPrev[i];

      // do not leave the spur node through a link already used by an
      // accepted path sharing the same root
      std::fill(myBannedLinks.begin(), myBannedLinks.end(), false);
      for (const auto& myAccepted : A) {
        if (myAccepted.size() > i + 1 and
            std::equal(myPrev.begin(),
                       myPrev.begin() + i + 1,
                       myAccepted.begin())) {
          myBannedLinks[*aTopology.linkIndex(myAccepted[i],
                                             myAccepted[i + 1])] = true;
        }
      }
      // the root nodes cannot be visited again
      std::fill(myBannedNodes.begin(), myBannedNodes.end(), false);
      for (std::size_t j = 0; j < i; j++) {
        myBannedNodes[myPrev[j]] = true;
      }

      auto mySpurPath = detail::smallestShortestPath(
          aTopology, mySpur, aTarget, myBannedNodes, myBannedLinks);
      if (mySpurPath) {
        Path myCandidate(myPrev.begin(), myPrev.begin() + i);
        myCandidate.insert(
            myCandidate.end(), mySpurPath->begin(), mySpurPath->end());
        myTentative.emplace(std::move(myCandidate));
      }
    }

    if (myTentative.empty()) {
      break;
    }
    A.push_back(std::move(myTentative.extract(myTentative.begin()).value()));
  }

  return ret;
}

/**
 * All the simple paths from aOrigin to aTarget, sorted by PathLess.
 *
 * Exponential in the size of the graph: meant for small instances.
 */
inline PathSet allSimplePaths(const QkdTopology& aTopology,
                              const NodeId       aOrigin,
                              const NodeId       aTarget) {
  aTopology.checkNode(aOrigin);
  aTopology.checkNode(aTarget);
  PathSet           ret{aOrigin, aTarget, {}};
  Path              myCurrent({aOrigin});
  std::vector<bool> myOnPath(aTopology.numNodes(), false);
  myOnPath[aOrigin] = true;
  detail::allSimplePathsRecursive(
      aTopology, aTarget, myCurrent, myOnPath, ret.thePaths);
  std::sort(ret.thePaths.begin(), ret.thePaths.end(), PathLess());
  return ret;
}

//! kShortestPaths() if aK is positive, allSimplePaths() otherwise.
inline PathSet candidatePaths(const QkdTopology& aTopology,
                              const NodeId       aOrigin,
                              const NodeId       aTarget,
                              const std::size_t  aK) {
  return aK == 0 ? allSimplePaths(aTopology, aOrigin, aTarget) :
                   kShortestPaths(aTopology, aOrigin, aTarget, aK);
}

/**
 * Lazily computed candidate paths from any node to every edge node.
 *
 * The topology is static during a run, so paths only need to be found once
 * per (attachment, edge node) pair.
 */
class PathCache
{
 public:
  struct Entry {
    Path                     thePath;
    std::vector<std::size_t> theLinks;
  };

  //! aK == 0 means all simple paths.
  PathCache(std::shared_ptr<const QkdTopology> aTopology, const std::size_t aK)
      : theTopology(std::move(aTopology))
      , theK(aK)
      , theEntries(theTopology->numNodes() * theTopology->edges().size()) {
  }

  std::size_t k() const noexcept {
    return theK;
  }

  const QkdTopology& topology() const noexcept {
    return *theTopology;
  }

  //! Paths from aOrigin to the aEdgeIndex-th edge node.
  const std::vector<Entry>& paths(const NodeId      aOrigin,
                                  const std::size_t aEdgeIndex) {
    theTopology->checkNode(aOrigin);
    auto& mySlot =
        theEntries.at(aOrigin * theTopology->edges().size() + aEdgeIndex);
    if (not mySlot) {
      const auto myTarget = theTopology->edges()[aEdgeIndex].theLocation;
      auto       myPaths = candidatePaths(*theTopology, aOrigin, myTarget, theK);
      mySlot.emplace();
      for (auto& myPath : myPaths.thePaths) {
        auto myLinks = pathLinks(*theTopology, aOrigin, myTarget, myPath);
        mySlot->emplace_back(Entry{std::move(myPath), std::move(myLinks)});
      }
    }
    return *mySlot;
  }

 private:
  std::shared_ptr<const QkdTopology>             theTopology;
  std::size_t                                    theK;
  std::vector<std::optional<std::vector<Entry>>> theEntries;
};

//! A feasible (edge node, path) pair, pointing into a PathCache.
struct CandidateRef {
  NodeId                  theEdge;
  std::size_t             theEdgeIndex;
  const PathCache::Entry* thePath;

  std::size_t hops() const noexcept {
    return thePath->thePath.size() - 1;
  }
};

/**
 * All the feasible (edge node, path) pairs for aRequest among the cached
 * candidate paths, ordered by hops, then edge NodeId, then node sequence.
 */
inline std::vector<CandidateRef> feasibleCandidates(const NetworkState& aState,
                                                    const AppRequest&   aRequest,
                                                    PathCache&          aCache) {
  std::vector<CandidateRef> ret;
  const auto&               myEdges = aState.topology().edges();
  for (std::size_t e = 0; e < myEdges.size(); e++) {
    for (const auto& myEntry : aCache.paths(aRequest.theAttachment, e)) {
      if (aState.fits(
              aRequest.theKeyRate, aRequest.theCpu, e, myEntry.theLinks)) {
        ret.push_back(CandidateRef{myEdges[e].theLocation, e, &myEntry});
      }
    }
  }
  // edge nodes are visited in increasing NodeId, paths are already sorted
  std::stable_sort(
      ret.begin(), ret.end(), [](const auto& lhs, const auto& rhs) {
        return lhs.hops() < rhs.hops();
      });
  return ret;
}

//! An (edge node, path) pair.
struct Candidate {
  NodeId theEdge;
  Path   thePath;

  bool operator==(const Candidate&) const = default;
};

/**
 * Joint candidate set over edge nodes and their aK shortest paths from the
 * request attachment, restricted to the feasible ones. aK == 0 means all
 * simple paths.
 */
inline std::vector<Candidate> candidateAssignments(const NetworkState& aState,
                                                   const QkdTopology&  aTopology,
                                                   const AppRequest&   aRequest,
                                                   const std::size_t   aK) {
  aRequest.validate();
  aTopology.checkNode(aRequest.theAttachment);
  if (&aTopology != &aState.topology() and not(aTopology == aState.topology())) {
    throw std::invalid_argument("state built on a different topology");
  }
  PathCache myCache(aState.sharedTopology(), aK);
  std::vector<Candidate> ret;
  for (const auto& myRef : feasibleCandidates(aState, aRequest, myCache)) {
    ret.push_back(Candidate{myRef.theEdge, myRef.thePath->thePath});
  }
  return ret;
}

} // namespace qkdedge
} // namespace uiiit
