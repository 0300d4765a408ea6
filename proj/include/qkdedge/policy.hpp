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
#include <cassert>
#include <cctype>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uiiit {
namespace qkdedge {

using Rng = std::mt19937_64;

/**
 * Online admission policies. All of them accept a request whenever at least
 * one candidate is feasible and differ only in which one they pick:
 *
 * - GreedyFirstFit: the first candidate (fewest hops, lowest edge NodeId)
 * - BestFit: the one leaving the least normalized slack (packing)
 * - LoadBalance: the one leaving the most normalized slack (spreading)
 * - RandomFit: uniformly at random
 */
enum class PolicyId {
  GreedyFirstFit,
  BestFit,
  LoadBalance,
  RandomFit,
};

inline std::string toString(const PolicyId aPolicy) {
  switch (aPolicy) {
    case PolicyId::GreedyFirstFit:
      return "GREEDY_FIRST_FIT";
    case PolicyId::BestFit:
      return "BEST_FIT";
    case PolicyId::LoadBalance:
      return "LOAD_BALANCE";
    case PolicyId::RandomFit:
      return "RANDOM_FIT";
  }
  throw std::runtime_error("Invalid policy: " +
                           std::to_string(static_cast<int>(aPolicy)));
}

inline const std::vector<PolicyId>& allPolicies() {
  static const std::vector<PolicyId> myPolicies({PolicyId::GreedyFirstFit,
                                                 PolicyId::BestFit,
                                                 PolicyId::LoadBalance,
                                                 PolicyId::RandomFit});
  return myPolicies;
}

//! Case-insensitive.
inline PolicyId policyFromString(const std::string& aName) {
  std::string myUpper(aName);
  std::transform(myUpper.begin(), myUpper.end(), myUpper.begin(), [](char c) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  });
  for (const auto myPolicy : allPolicies()) {
    if (toString(myPolicy) == myUpper) {
      return myPolicy;
    }
  }
  throw std::invalid_argument("Invalid policy: " + aName);
}

//! Weights of the cpu and key terms in the slack score.
struct ScoreWeights {
  double theCpu = 1;
  double theKey = 1;
};

struct Decision {
  std::optional<Assignment> theAssignment;

  bool accepted() const noexcept {
    return theAssignment.has_value();
  }
};

//! Integer in [0, aSize) from exactly one draw of aRng.
inline std::size_t uniformIndex(Rng& aRng, const std::size_t aSize) {
  assert(aSize > 0);
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(aRng()) * aSize) >> 64);
}

/**
 * Normalized slack left by admitting aRequest on aCandidate:
 *
 *   (residual cpu - demand) / capacity
 *   + min over the path links of (residual rate - demand) / link rate
 *
 * A path without links contributes a zero key term.
 */
inline double slackScore(const NetworkState& aState,
                         const AppRequest&   aRequest,
                         const CandidateRef& aCandidate,
                         const ScoreWeights& aWeights = {}) {
  const auto& myTopology = aState.topology();
  const auto  myCapacity = myTopology.edges()[aCandidate.theEdgeIndex].theCpu;
  const auto  myCpuSlack =
      myCapacity > 0 ?
           (aState.residualCpu()[aCandidate.theEdgeIndex] - aRequest.theCpu) /
              myCapacity :
           0.0;

  double myKeySlack = 0;
  if (not aCandidate.thePath->theLinks.empty()) {
    myKeySlack = std::numeric_limits<double>::max();
    for (const auto myLink : aCandidate.thePath->theLinks) {
      const auto myRate = myTopology.links()[myLink].theSkr;
      myKeySlack        = std::min(
          myKeySlack,
          myRate > 0 ?
                     (aState.residualSkr()[myLink] - aRequest.theKeyRate) / myRate :
                     0.0);
    }
  }
  return aWeights.theCpu * myCpuSlack + aWeights.theKey * myKeySlack;
}

/**
 * Index of the candidate selected by aPolicy among aCandidates, which must
 * not be empty. Score ties within kTolerance go to the earliest candidate.
 */
inline std::size_t choose(const PolicyId                  aPolicy,
                          const NetworkState&             aState,
                          const AppRequest&               aRequest,
                          std::span<const CandidateRef>   aCandidates,
                          Rng&                            aRng,
                          const ScoreWeights&             aWeights = {}) {
  if (aCandidates.empty()) {
    throw std::invalid_argument("no candidates to choose from");
  }
  switch (aPolicy) {
    case PolicyId::GreedyFirstFit:
      return 0;
    case PolicyId::RandomFit:
      return uniformIndex(aRng, aCandidates.size());
    case PolicyId::BestFit:
    case PolicyId::LoadBalance: {
      const double mySign = aPolicy == PolicyId::BestFit ? 1.0 : -1.0;
      std::size_t  ret    = 0;
      double       myBest =
          mySign * slackScore(aState, aRequest, aCandidates[0], aWeights);
      for (std::size_t i = 1; i < aCandidates.size(); i++) {
        const auto myScore =
            mySign * slackScore(aState, aRequest, aCandidates[i], aWeights);
        if (myScore < myBest - kTolerance) {
          myBest = myScore;
          ret    = i;
        }
      }
      return ret;
    }
  }
  throw std::runtime_error("Invalid policy: " +
                           std::to_string(static_cast<int>(aPolicy)));
}

//! Admission decision using the candidate paths in aCache.
inline Decision decide(const PolicyId      aPolicy,
                       const NetworkState& aState,
                       const AppRequest&   aRequest,
                       PathCache&          aCache,
                       Rng&                aRng,
                       const ScoreWeights& aWeights = {}) {
  const auto myCandidates = feasibleCandidates(aState, aRequest, aCache);
  if (myCandidates.empty()) {
    return Decision{};
  }
  const auto& myChosen =
      myCandidates[choose(aPolicy, aState, aRequest, myCandidates, aRng, aWeights)];
  return Decision{
      Assignment::make(aRequest, myChosen.theEdge, myChosen.thePath->thePath)};
}

/**
 * Admission decision for aRequest in aState considering, for every edge
 * node, the aK shortest paths from the attachment node.
 *
 * aRng is only used by PolicyId::RandomFit, which draws exactly once when
 * there is at least one candidate.
 */
inline Decision decide(const PolicyId      aPolicy,
                       const NetworkState& aState,
                       const QkdTopology&  aTopology,
                       const AppRequest&   aRequest,
                       const std::size_t   aK,
                       Rng&                aRng,
                       const ScoreWeights& aWeights = {}) {
  aRequest.validate();
  aTopology.checkNode(aRequest.theAttachment);
  if (&aTopology != &aState.topology() and not(aTopology == aState.topology())) {
    throw std::invalid_argument("state built on a different topology");
  }
  PathCache myCache(aState.sharedTopology(), aK);
  return decide(aPolicy, aState, aRequest, myCache, aRng, aWeights);
}

} // namespace qkdedge
} // namespace uiiit
