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
#include "qkdedge/paths.hpp"
#include "qkdedge/request.hpp"
#include "qkdedge/topology.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace uiiit {
namespace qkdedge {

//! Largest number of requests accepted by offlineOptimum().
inline constexpr std::size_t kOracleMaxRequests = 12;

struct OfflineInstance {
  std::shared_ptr<const QkdTopology> theTopology;
  std::vector<AppRequest>            theRequests;
  //! Candidate paths per (attachment, edge node): 0 means all simple paths.
  std::size_t theK = 0;
  //! Value of each request, aligned with theRequests: empty means all 1.
  std::vector<double> theWeights;
};

struct OfflineResult {
  std::size_t             theMaxAccepted = 0;
  double                  theValue       = 0;
  std::vector<Assignment> theWitness; //!< sorted by request id
};

namespace detail {

class OfflineSearch
{
 public:
  OfflineSearch(const OfflineInstance& aInstance)
      : theCache(aInstance.theTopology, aInstance.theK)
      , theRequests()
      , theWeights()
      , theRemaining()
      , theInteracts()
      , theCurrent()
      , theCurrentValue(0)
      , theBest()
      , theBestValue(-1) {
    std::vector<std::size_t> myOrder(aInstance.theRequests.size());
    std::iota(myOrder.begin(), myOrder.end(), 0);
    std::sort(myOrder.begin(), myOrder.end(), [&](auto lhs, auto rhs) {
      const auto& l = aInstance.theRequests[lhs];
      const auto& r = aInstance.theRequests[rhs];
      return std::tie(l.theArrival, l.theId) < std::tie(r.theArrival, r.theId);
    });
    for (const auto i : myOrder) {
      theRequests.push_back(aInstance.theRequests[i]);
      theWeights.push_back(
          aInstance.theWeights.empty() ? 1.0 : aInstance.theWeights[i]);
    }

    const auto n = theRequests.size();
    theRemaining.assign(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
      theRemaining[i] = theRemaining[i + 1] + theWeights[i];
    }
    // the choice of (edge, path) of a request only matters if a later one
    // arrives while it is still active
    theInteracts.assign(n, false);
    for (std::size_t i = 0; i < n; i++) {
      for (std::size_t j = i + 1; j < n; j++) {
        if (theRequests[j].theArrival < theRequests[i].departure()) {
          theInteracts[i] = true;
          break;
        }
      }
    }
  }

  OfflineResult operator()(const NetworkState& aState) {
    search(0, aState);
    OfflineResult ret;
    ret.theMaxAccepted = theBest.size();
    ret.theValue       = std::max(0.0, theBestValue);
    ret.theWitness     = theBest;
    std::sort(ret.theWitness.begin(),
              ret.theWitness.end(),
              [](const auto& l, const auto& r) {
                return l.theRequest < r.theRequest;
              });
    return ret;
  }

 private:
  // Depth-first over the requests in arrival order, trying to accept before
  // rejecting: among maxima, the first one found has the lexicographically
  // smallest set of ids (ids increase with arrival times).
  void search(const std::size_t aIndex, const NetworkState& aState) {
    if (theCurrentValue + theRemaining[aIndex] <= theBestValue or
        theBestValue >= theRemaining[0]) {
      return;
    }
    if (aIndex == theRequests.size()) {
      theBest      = theCurrent;
      theBestValue = theCurrentValue;
      return;
    }

    const auto& myRequest = theRequests[aIndex];
    NetworkState myState(aState);
    for (const auto myId : myState.activeIds()) {
      if (myRequest.theArrival >= departureOf(myId)) {
        myState.release(myId);
      }
    }

    const auto myCandidates = feasibleCandidates(myState, myRequest, theCache);
    const auto myNumTries =
        theInteracts[aIndex] ? myCandidates.size() :
                               std::min<std::size_t>(1, myCandidates.size());
    for (std::size_t c = 0; c < myNumTries; c++) {
      auto myAssignment = Assignment::make(
          myRequest, myCandidates[c].theEdge, myCandidates[c].thePath->thePath);
      NetworkState myNext(myState);
      myNext.reserve(myAssignment);
      theCurrent.emplace_back(std::move(myAssignment));
      theCurrentValue += theWeights[aIndex];
      search(aIndex + 1, myNext);
      theCurrentValue -= theWeights[aIndex];
      theCurrent.pop_back();
    }
    search(aIndex + 1, myState);
  }

  double departureOf(const RequestId aId) const {
    for (const auto& myRequest : theRequests) {
      if (myRequest.theId == aId) {
        return myRequest.departure();
      }
    }
    throw std::logic_error("unknown request " + std::to_string(aId));
  }

  PathCache               theCache;
  std::vector<AppRequest> theRequests;
  std::vector<double>     theWeights;
  std::vector<double>     theRemaining;
  std::vector<bool>       theInteracts;
  std::vector<Assignment> theCurrent;
  double                  theCurrentValue;
  std::vector<Assignment> theBest;
  double                  theBestValue;
};

} // namespace detail

/**
 * Clairvoyant maximum number of requests that can be admitted, each with
 * its own (edge node, path), so that capacities are never exceeded while
 * requests are active over [arrival, arrival + holding).
 *
 * Exhaustive search, hence limited to kOracleMaxRequests requests.
 *
 * \throw std::invalid_argument if the instance is too large or invalid.
 */
inline OfflineResult offlineOptimum(const OfflineInstance& aInstance) {
  if (aInstance.theRequests.size() > kOracleMaxRequests) {
    throw std::invalid_argument("instance exceeds oracle limit");
  }
  if (not aInstance.theTopology) {
    throw std::invalid_argument("null topology");
  }
  if (not aInstance.theWeights.empty() and
      aInstance.theWeights.size() != aInstance.theRequests.size()) {
    throw std::invalid_argument("one weight per request expected");
  }
  std::set<RequestId> myIds;
  for (const auto& myRequest : aInstance.theRequests) {
    myRequest.validate();
    aInstance.theTopology->checkNode(myRequest.theAttachment);
    if (not myIds.insert(myRequest.theId).second) {
      throw std::invalid_argument("duplicate request id " +
                                  std::to_string(myRequest.theId));
    }
  }
  for (const auto w : aInstance.theWeights) {
    if (not(w >= 0)) {
      throw std::invalid_argument("negative request weight");
    }
  }

  detail::OfflineSearch mySearch(aInstance);
  return mySearch(NetworkState(aInstance.theTopology));
}

} // namespace qkdedge
} // namespace uiiit
