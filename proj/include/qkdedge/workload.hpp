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

#include "qkdedge/policy.hpp"
#include "qkdedge/request.hpp"
#include "qkdedge/topology.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace uiiit {
namespace qkdedge {

/**
 * Random number generator for the stream labelled aLabel of the run with
 * seed aSeed. Different labels give statistically independent streams.
 */
inline Rng makeRng(const std::uint64_t aSeed, const std::string_view aLabel) {
  std::vector<std::uint32_t> myData({static_cast<std::uint32_t>(aSeed),
                                     static_cast<std::uint32_t>(aSeed >> 32)});
  for (const auto c : aLabel) {
    myData.push_back(static_cast<unsigned char>(c));
  }
  std::seed_seq mySeq(myData.begin(), myData.end());
  return Rng(mySeq);
}

//! Distribution of a positive quantity, e.g., a request demand.
class Distribution
{
 public:
  enum class Kind { Deterministic, Uniform, Exponential };

  static Distribution deterministic(const double aValue) {
    return Distribution(Kind::Deterministic, aValue, aValue);
  }
  static Distribution uniform(const double aMin, const double aMax) {
    return Distribution(Kind::Uniform, aMin, aMax);
  }
  static Distribution exponential(const double aMean) {
    return Distribution(Kind::Exponential, aMean, aMean);
  }

  /**
   * Parse one of DETERMINISTIC(v), UNIFORM(a,b), EXPONENTIAL(mean), with
   * case-insensitive names.
   *
   * \throw std::invalid_argument if malformed or not strictly positive.
   */
  static Distribution parse(const std::string& aSpec) {
    static const std::regex myRegex(
        R"(^\s*([A-Za-z_]+)\s*\(\s*([^,\s\)]+)\s*(?:,\s*([^,\s\)]+)\s*)?\)\s*$)");
    std::smatch myMatch;
    if (not std::regex_match(aSpec, myMatch, myRegex)) {
      throw std::invalid_argument("Invalid distribution: " + aSpec);
    }
    std::string myName = myMatch[1];
    std::transform(myName.begin(), myName.end(), myName.begin(), [](char c) {
      return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    });
    const auto myNumber = [&aSpec](const std::string& aValue) {
      std::size_t myPos = 0;
      double      ret   = 0;
      try {
        ret = std::stod(aValue, &myPos);
      } catch (const std::exception&) {
        myPos = 0;
      }
      if (myPos != aValue.size()) {
        throw std::invalid_argument("Invalid number '" + aValue +
                                    "' in distribution: " + aSpec);
      }
      return ret;
    };
    const bool myTwoArgs = myMatch[3].matched;
    if (myName == "DETERMINISTIC" and not myTwoArgs) {
      return deterministic(myNumber(myMatch[2]));
    } else if (myName == "UNIFORM" and myTwoArgs) {
      return uniform(myNumber(myMatch[2]), myNumber(myMatch[3]));
    } else if (myName == "EXPONENTIAL" and not myTwoArgs) {
      return exponential(myNumber(myMatch[2]));
    }
    throw std::invalid_argument("Invalid distribution: " + aSpec);
  }

  Kind kind() const noexcept {
    return theKind;
  }

  double mean() const noexcept {
    return theKind == Kind::Uniform ? (theA + theB) / 2 : theA;
  }

  //! Always strictly positive.
  double operator()(Rng& aRng) const {
    switch (theKind) {
      case Kind::Deterministic:
        return theA;
      case Kind::Uniform:
        if (theA == theB) {
          return theA;
        }
        return std::uniform_real_distribution<double>(theA, theB)(aRng);
      case Kind::Exponential: {
        std::exponential_distribution<double> myDist(1.0 / theA);
        double                                ret = 0;
        do {
          ret = myDist(aRng);
        } while (ret <= 0);
        return ret;
      }
    }
    return theA;
  }

  std::string toString() const {
    std::stringstream ret;
    switch (theKind) {
      case Kind::Deterministic:
        ret << "DETERMINISTIC(" << theA << ")";
        break;
      case Kind::Uniform:
        ret << "UNIFORM(" << theA << "," << theB << ")";
        break;
      case Kind::Exponential:
        ret << "EXPONENTIAL(" << theA << ")";
        break;
    }
    return ret.str();
  }

  bool operator==(const Distribution&) const = default;

 private:
  Distribution(const Kind aKind, const double aA, const double aB)
      : theKind(aKind)
      , theA(aA)
      , theB(aB) {
    if (not std::isfinite(theA) or not std::isfinite(theB) or theA <= 0 or
        theB < theA) {
      throw std::invalid_argument("Invalid distribution parameters: " +
                                  toString());
    }
  }

  Kind   theKind;
  double theA;
  double theB;
};

//! Poisson arrivals, exponential holding times, i.i.d. demands.
struct WorkloadSpec {
  double       theArrivalRate = 1; //!< requests/s
  double       theMeanHolding = 1; //!< s
  Distribution theKeyRate     = Distribution::deterministic(1);
  Distribution theCpu         = Distribution::deterministic(1);
  //! Weight of every node as attachment point; empty means uniform.
  std::vector<double> theAttachmentWeights;
  double              theHorizon = 1000; //!< s
  std::uint64_t       theSeed    = 0;

  //! \throw std::invalid_argument if not usable with aTopology.
  void validate(const QkdTopology& aTopology) const {
    if (not std::isfinite(theArrivalRate) or theArrivalRate <= 0) {
      throw std::invalid_argument("Invalid non-positive arrival rate");
    }
    if (not std::isfinite(theMeanHolding) or theMeanHolding <= 0) {
      throw std::invalid_argument("Invalid non-positive mean holding time");
    }
    if (not std::isfinite(theHorizon) or theHorizon < 0) {
      throw std::invalid_argument("Invalid negative horizon");
    }
    if (not theAttachmentWeights.empty()) {
      if (theAttachmentWeights.size() != aTopology.numNodes()) {
        throw std::invalid_argument(
            "Invalid attachment weights: expected one per node");
      }
      double mySum = 0;
      for (const auto w : theAttachmentWeights) {
        if (not std::isfinite(w) or w < 0) {
          throw std::invalid_argument(
              "Invalid negative attachment weight");
        }
        mySum += w;
      }
      if (mySum <= 0) {
        throw std::invalid_argument("Invalid all-zero attachment weights");
      }
    }
  }
};

enum class EventType {
  Departure = 0, // goes first at equal times
  Arrival   = 1,
};

struct Event {
  double     theTime;
  EventType  theType;
  AppRequest theRequest; //!< only theId is meaningful for departures

  bool operator<(const Event& aOther) const noexcept {
    return std::tie(theTime, theType, theRequest.theId) <
           std::tie(aOther.theTime, aOther.theType, aOther.theRequest.theId);
  }
};

//! Arrivals and departures in processing order over [0, theHorizon).
struct EventTrace {
  double             theHorizon = 0;
  std::vector<Event> theEvents;

  std::size_t numArrivals() const noexcept {
    return std::count_if(theEvents.begin(), theEvents.end(), [](const auto& e) {
      return e.theType == EventType::Arrival;
    });
  }

  std::vector<AppRequest> requests() const {
    std::vector<AppRequest> ret;
    for (const auto& myEvent : theEvents) {
      if (myEvent.theType == EventType::Arrival) {
        ret.push_back(myEvent.theRequest);
      }
    }
    return ret;
  }

  //! \throw std::invalid_argument if a request does not fit aTopology.
  void validate(const QkdTopology& aTopology) const {
    for (const auto& myEvent : theEvents) {
      if (myEvent.theType == EventType::Arrival) {
        myEvent.theRequest.validate();
        if (not aTopology.hasNode(myEvent.theRequest.theAttachment)) {
          throw std::invalid_argument(
              "request " + std::to_string(myEvent.theRequest.theId) +
              " attached to unknown node " +
              std::to_string(myEvent.theRequest.theAttachment));
        }
      }
    }
  }
};

/**
 * Trace with an arrival and a departure for each of aRequests.
 *
 * \throw std::invalid_argument if a request is invalid, ids are duplicated,
 * or ids are not increasing with arrival times.
 */
inline EventTrace makeTrace(std::vector<AppRequest> aRequests,
                            const double            aHorizon) {
  if (not std::isfinite(aHorizon) or aHorizon < 0) {
    throw std::invalid_argument("Invalid negative horizon");
  }
  std::sort(aRequests.begin(), aRequests.end(), [](const auto& l, const auto& r) {
    return std::tie(l.theArrival, l.theId) < std::tie(r.theArrival, r.theId);
  });
  EventTrace ret{aHorizon, {}};
  ret.theEvents.reserve(aRequests.size() * 2);
  for (std::size_t i = 0; i < aRequests.size(); i++) {
    const auto& myRequest = aRequests[i];
    myRequest.validate();
    if (i > 0 and myRequest.theId <= aRequests[i - 1].theId) {
      throw std::invalid_argument(
          "request ids must be unique and increasing with arrival time: " +
          std::to_string(myRequest.theId));
    }
    ret.theEvents.push_back(
        Event{myRequest.theArrival, EventType::Arrival, myRequest});
    ret.theEvents.push_back(
        Event{myRequest.departure(), EventType::Departure, myRequest});
  }
  std::sort(ret.theEvents.begin(), ret.theEvents.end());
  return ret;
}

/**
 * Draw a workload with aSpec on aTopology. The trace depends only on the
 * topology and on aSpec, including its seed.
 */
inline EventTrace generateTrace(const QkdTopology& aTopology,
                                const WorkloadSpec& aSpec) {
  aSpec.validate(aTopology);
  auto myRng = makeRng(aSpec.theSeed, "trace");

  std::exponential_distribution<double> myInterArrival(aSpec.theArrivalRate);
  std::exponential_distribution<double> myHolding(1.0 / aSpec.theMeanHolding);
  std::discrete_distribution<std::size_t> myAttachment(
      aSpec.theAttachmentWeights.begin(), aSpec.theAttachmentWeights.end());
  const bool myUniformAttachment = aSpec.theAttachmentWeights.empty();

  std::vector<AppRequest> myRequests;
  double                  myTime = myInterArrival(myRng);
  while (myTime < aSpec.theHorizon) {
    AppRequest myRequest;
    myRequest.theId      = myRequests.size();
    myRequest.theArrival = myTime;
    myRequest.theAttachment =
        static_cast<NodeId>(myUniformAttachment ?
                                uniformIndex(myRng, aTopology.numNodes()) :
                                myAttachment(myRng));
    myRequest.theKeyRate = aSpec.theKeyRate(myRng);
    myRequest.theCpu     = aSpec.theCpu(myRng);
    do {
      myRequest.theHolding = myHolding(myRng);
    } while (myRequest.theHolding <= 0);
    myRequests.push_back(myRequest);
    myTime += myInterArrival(myRng);
  }
  return makeTrace(std::move(myRequests), aSpec.theHorizon);
}

} // namespace qkdedge
} // namespace uiiit
