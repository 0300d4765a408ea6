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

#include "qkdedge/request.hpp"
#include "qkdedge/topology.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace uiiit {
namespace qkdedge {

/**
 * Check that aPath is a simple path from aAttachment to the edge node at
 * aEdge whose consecutive nodes are joined by links.
 *
 * \return the indices of the links traversed, in order.
 *
 * \throw std::invalid_argument naming the broken property otherwise.
 */
inline std::vector<std::size_t> pathLinks(const QkdTopology&      aTopology,
                                          const NodeId            aAttachment,
                                          const NodeId            aEdge,
                                          std::span<const NodeId> aPath) {
  const auto fail = [&](const std::string& aWhat) {
    throw std::invalid_argument("invalid path " +
                                toString(Path(aPath.begin(), aPath.end())) +
                                " from " + std::to_string(aAttachment) +
                                " to " + std::to_string(aEdge) + ": " + aWhat);
  };
  if (not aTopology.edgeIndex(aEdge).has_value()) {
    fail("no edge node at " + std::to_string(aEdge));
  }
  if (aPath.empty()) {
    fail("empty");
  }
  if (aPath.front() != aAttachment or aPath.back() != aEdge) {
    fail("wrong endpoints");
  }
  Path mySorted(aPath.begin(), aPath.end());
  std::sort(mySorted.begin(), mySorted.end());
  if (std::adjacent_find(mySorted.begin(), mySorted.end()) != mySorted.end()) {
    fail("not simple");
  }
  std::vector<std::size_t> ret;
  ret.reserve(aPath.size() - 1);
  for (std::size_t i = 1; i < aPath.size(); i++) {
    const auto myLink = aTopology.linkIndex(aPath[i - 1], aPath[i]);
    if (not myLink.has_value()) {
      fail("no link between " + std::to_string(aPath[i - 1]) + " and " +
           std::to_string(aPath[i]));
    }
    ret.push_back(*myLink);
  }
  return ret;
}

/**
 * Residual secret-key rates and edge capacities, plus the assignments that
 * are currently holding reservations.
 *
 * The topology is shared read-only between copies; everything else is owned.
 */
class NetworkState
{
  struct Entry {
    Assignment               theAssignment;
    std::vector<std::size_t> theLinks;
    std::size_t              theEdge;
  };

 public:
  explicit NetworkState(std::shared_ptr<const QkdTopology> aTopology)
      : theTopology(std::move(aTopology))
      , theResidualSkr()
      , theResidualCpu()
      , theActive() {
    if (not theTopology) {
      throw std::invalid_argument("null topology");
    }
    for (const auto& myLink : theTopology->links()) {
      theResidualSkr.push_back(myLink.theSkr);
    }
    for (const auto& myEdge : theTopology->edges()) {
      theResidualCpu.push_back(myEdge.theCpu);
    }
  }

  explicit NetworkState(const QkdTopology& aTopology)
      : NetworkState(std::make_shared<const QkdTopology>(aTopology)) {
  }

  const QkdTopology& topology() const noexcept {
    return *theTopology;
  }
  const std::shared_ptr<const QkdTopology>& sharedTopology() const noexcept {
    return theTopology;
  }

  //! Indexed as QkdTopology::links().
  const std::vector<double>& residualSkr() const noexcept {
    return theResidualSkr;
  }
  //! Indexed as QkdTopology::edges().
  const std::vector<double>& residualCpu() const noexcept {
    return theResidualCpu;
  }

  double residualSkr(const NodeId aFrom, const NodeId aTo) const {
    const auto myLink = theTopology->linkIndex(aFrom, aTo);
    if (not myLink) {
      throw std::invalid_argument("no link between " + std::to_string(aFrom) +
                                  " and " + std::to_string(aTo));
    }
    return theResidualSkr[*myLink];
  }

  double residualCpu(const NodeId aLocation) const {
    const auto myEdge = theTopology->edgeIndex(aLocation);
    if (not myEdge) {
      throw std::invalid_argument("no edge node at " +
                                  std::to_string(aLocation));
    }
    return theResidualCpu[*myEdge];
  }

  std::size_t numActive() const noexcept {
    return theActive.size();
  }
  bool isActive(const RequestId aId) const noexcept {
    return theActive.count(aId) > 0;
  }

  //! \throw std::out_of_range if aId is not active.
  const Assignment& assignment(const RequestId aId) const {
    const auto it = theActive.find(aId);
    if (it == theActive.end()) {
      throw std::out_of_range("unknown request " + std::to_string(aId));
    }
    return it->second.theAssignment;
  }

  //! Identifiers of the active requests, in increasing order.
  std::vector<RequestId> activeIds() const {
    std::vector<RequestId> ret;
    ret.reserve(theActive.size());
    for (const auto& myPair : theActive) {
      ret.push_back(myPair.first);
    }
    std::sort(ret.begin(), ret.end());
    return ret;
  }

  /**
   * \return true iff aRequest fits on the edge node at aEdge and on every link
   * of aPath.
   *
   * \throw std::invalid_argument if the path is structurally invalid.
   */
  bool feasible(const AppRequest&       aRequest,
                const NodeId            aEdge,
                std::span<const NodeId> aPath) const {
    const auto myLinks =
        pathLinks(*theTopology, aRequest.theAttachment, aEdge, aPath);
    return fits(aRequest.theKeyRate,
                aRequest.theCpu,
                *theTopology->edgeIndex(aEdge),
                myLinks);
  }

  //! Like feasible() with a path already resolved into link indices.
  bool fits(const double                 aKeyRate,
            const double                 aCpu,
            const std::size_t            aEdgeIndex,
            std::span<const std::size_t> aLinks) const noexcept {
    if (aCpu > theResidualCpu[aEdgeIndex] + kTolerance) {
      return false;
    }
    for (const auto myLink : aLinks) {
      if (aKeyRate > theResidualSkr[myLink] + kTolerance) {
        return false;
      }
    }
    return true;
  }

  /**
   * Reserve resources for aAssignment.
   *
   * \throw std::invalid_argument if the path is invalid, the assignment does
   * not fit, or its request is already active.
   */
  void reserve(Assignment aAssignment) {
    if (theActive.count(aAssignment.theRequest) > 0) {
      throw std::invalid_argument("request " +
                                  std::to_string(aAssignment.theRequest) +
                                  " already active");
    }
    if (not std::isfinite(aAssignment.theKeyRate) or
        not std::isfinite(aAssignment.theCpu) or
        aAssignment.theKeyRate <= 0 or aAssignment.theCpu <= 0) {
      throw std::invalid_argument("request " +
                                  std::to_string(aAssignment.theRequest) +
                                  " has non-positive reservations");
    }
    if (aAssignment.thePath.empty()) {
      throw std::invalid_argument("request " +
                                  std::to_string(aAssignment.theRequest) +
                                  " has an empty path");
    }
    auto myLinks = pathLinks(*theTopology,
                             aAssignment.thePath.front(),
                             aAssignment.theEdge,
                             aAssignment.thePath);
    const auto myEdge = *theTopology->edgeIndex(aAssignment.theEdge);
    if (not fits(
            aAssignment.theKeyRate, aAssignment.theCpu, myEdge, myLinks)) {
      throw std::invalid_argument("request " +
                                  std::to_string(aAssignment.theRequest) +
                                  " does not fit on edge " +
                                  std::to_string(aAssignment.theEdge) +
                                  " via " + toString(aAssignment.thePath));
    }
    theResidualCpu[myEdge] -= aAssignment.theCpu;
    for (const auto myLink : myLinks) {
      theResidualSkr[myLink] -= aAssignment.theKeyRate;
    }
    const auto myId = aAssignment.theRequest;
    theActive.emplace(myId,
                      Entry{std::move(aAssignment), std::move(myLinks), myEdge});
  }

  /**
   * Give back the resources held by the request aId.
   *
   * \return the assignment released.
   *
   * \throw std::invalid_argument if aId is not active.
   */
  Assignment release(const RequestId aId) {
    const auto it = theActive.find(aId);
    if (it == theActive.end()) {
      throw std::invalid_argument("cannot release unknown request " +
                                  std::to_string(aId));
    }
    auto& myEntry = it->second;
    theResidualCpu[myEntry.theEdge] += myEntry.theAssignment.theCpu;
    for (const auto myLink : myEntry.theLinks) {
      theResidualSkr[myLink] += myEntry.theAssignment.theKeyRate;
    }
    auto ret = std::move(myEntry.theAssignment);
    theActive.erase(it);
    return ret;
  }

  /**
   * Recompute the residuals from the capacities and the active reservations.
   *
   * \return a description of the first discrepancy beyond kTolerance, or
   * nothing if the bookkeeping is consistent.
   */
  std::optional<std::string> conservationViolation() const {
    std::vector<double> mySkr(theResidualSkr.size(), 0);
    std::vector<double> myCpu(theResidualCpu.size(), 0);
    for (const auto& myPair : theActive) {
      const auto& myEntry = myPair.second;
      myCpu[myEntry.theEdge] += myEntry.theAssignment.theCpu;
      for (const auto myLink : myEntry.theLinks) {
        mySkr[myLink] += myEntry.theAssignment.theKeyRate;
      }
    }
    const auto& myLinks = theTopology->links();
    for (std::size_t i = 0; i < myLinks.size(); i++) {
      const auto myExpected = myLinks[i].theSkr - mySkr[i];
      const auto myTol = tolerance(myLinks[i].theSkr);
      if (std::abs(myExpected - theResidualSkr[i]) > myTol or
          theResidualSkr[i] < -myTol or theResidualSkr[i] > myLinks[i].theSkr + myTol) {
        std::stringstream ret;
        ret << "link " << myLinks[i].theA << "-" << myLinks[i].theB
            << ": residual " << theResidualSkr[i] << ", expected "
            << myExpected << " (capacity " << myLinks[i].theSkr << ")";
        return ret.str();
      }
    }
    const auto& myEdges = theTopology->edges();
    for (std::size_t i = 0; i < myEdges.size(); i++) {
      const auto myExpected = myEdges[i].theCpu - myCpu[i];
      const auto myTol = tolerance(myEdges[i].theCpu);
      if (std::abs(myExpected - theResidualCpu[i]) > myTol or
          theResidualCpu[i] < -myTol or theResidualCpu[i] > myEdges[i].theCpu + myTol) {
        std::stringstream ret;
        ret << "edge " << myEdges[i].theLocation << ": residual "
            << theResidualCpu[i] << ", expected " << myExpected
            << " (capacity " << myEdges[i].theCpu << ")";
        return ret.str();
      }
    }
    return std::nullopt;
  }

  //! \throw std::logic_error if conservationViolation() finds anything.
  void checkConservation() const {
    if (const auto myError = conservationViolation(); myError) {
      throw std::logic_error("conservation breach: " + *myError);
    }
  }

  //! Reserved key rate summed over all links.
  double reservedSkr() const noexcept {
    double ret = 0;
    const auto& myLinks = theTopology->links();
    for (std::size_t i = 0; i < myLinks.size(); i++) {
      ret += myLinks[i].theSkr - theResidualSkr[i];
    }
    return ret;
  }

  //! Reserved processing summed over all edge nodes.
  double reservedCpu() const noexcept {
    double ret = 0;
    const auto& myEdges = theTopology->edges();
    for (std::size_t i = 0; i < myEdges.size(); i++) {
      ret += myEdges[i].theCpu - theResidualCpu[i];
    }
    return ret;
  }

 private:
  /**
   * Tolerance used by the conservation check for a resource of the given
   * capacity: kTolerance for capacities up to 1, growing proportionally
   * beyond, since the incremental residual updates accumulate round-off
   * relative to the magnitudes involved.
   */
  static double tolerance(const double aCapacity) noexcept {
    return kTolerance * std::max(1.0, aCapacity);
  }

  std::shared_ptr<const QkdTopology>        theTopology;
  std::vector<double>                       theResidualSkr;
  std::vector<double>                       theResidualCpu;
  std::unordered_map<RequestId, Entry>      theActive;
};

} // namespace qkdedge
} // namespace uiiit
