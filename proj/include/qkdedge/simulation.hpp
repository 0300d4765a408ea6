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
#include "qkdedge/policy.hpp"
#include "qkdedge/workload.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace uiiit {
namespace qkdedge {

struct RunOptions {
  //! Initial fraction of the horizon excluded from the metrics.
  double       theWarmupFraction = 0.1;
  ScoreWeights theWeights;
  //! Verify the bookkeeping every this many events.
#ifdef NDEBUG
  std::size_t theCheckEvery = 1000;
#else
  std::size_t theCheckEvery = 1;
#endif
};

struct RunMetrics {
  std::size_t theOffered         = 0;
  std::size_t theAccepted        = 0;
  double      theAcceptanceRatio = 1;
  double      theCarriedKeyRate  = 0; //!< b/s, summed over links
  double      theCpuUtilization  = 0;
  double      theSkrUtilization  = 0;
  double      theMeanPathHops    = 0;

  bool operator==(const RunMetrics&) const = default;

  std::string toString() const {
    std::stringstream ret;
    ret << "offered " << theOffered << ", accepted " << theAccepted
        << " (ratio " << theAcceptanceRatio << "), carried key rate "
        << theCarriedKeyRate << " b/s, cpu util " << theCpuUtilization
        << ", skr util " << theSkrUtilization << ", mean hops "
        << theMeanPathHops;
    return ret.str();
  }
};

//! Outcome of one arrival: theEdge and thePath are set only if accepted.
struct LogEntry {
  RequestId theId       = 0;
  bool      theAccepted = false;
  NodeId    theEdge     = 0;
  Path      thePath;

  bool operator==(const LogEntry&) const = default;
};

struct RunResult {
  RunMetrics            theMetrics;
  std::vector<LogEntry> theLog;
};

/**
 * Feed the arrivals of aTrace to aPolicy in order, reserving resources for
 * admitted requests until their departure.
 *
 * Metrics are time averages over [warmup * horizon, horizon), counters refer
 * to the arrivals within the same window; the log has all the arrivals.
 *
 * \param aSeed seeds the policy random stream, independent from the trace.
 *
 * \throw std::logic_error if the resource bookkeeping is found inconsistent.
 */
inline RunResult run(std::shared_ptr<const QkdTopology> aTopology,
                     const EventTrace&                  aTrace,
                     const PolicyId                     aPolicy,
                     const std::size_t                  aK,
                     const std::uint64_t                aSeed,
                     const RunOptions&                  aOptions = {}) {
  aTrace.validate(*aTopology);
  if (aK == 0) {
    throw std::invalid_argument("the number of paths must be positive");
  }
  if (not(aOptions.theWarmupFraction >= 0 and
          aOptions.theWarmupFraction < 1)) {
    throw std::invalid_argument("Invalid warm-up fraction");
  }

  NetworkState myState(aTopology);
  PathCache    myCache(aTopology, aK);
  auto         myRng = makeRng(aSeed, "policy");

  const auto myHorizon = aTrace.theHorizon;
  const auto myStart   = aOptions.theWarmupFraction * myHorizon;

  RunResult   ret;
  auto&       myMetrics     = ret.theMetrics;
  double      mySkrArea     = 0;
  double      myCpuArea     = 0;
  double      myReservedSkr = 0;
  double      myReservedCpu = 0;
  double      myLastTime    = 0;
  std::size_t myHopsSum     = 0;
  std::size_t myNumEvents   = 0;

  const auto advance = [&](const double aTime) {
    const auto myFrom = std::max(myLastTime, myStart);
    const auto myTo   = std::min(aTime, myHorizon);
    if (myTo > myFrom) {
      mySkrArea += myReservedSkr * (myTo - myFrom);
      myCpuArea += myReservedCpu * (myTo - myFrom);
    }
    myLastTime = std::max(myLastTime, aTime);
  };

  for (const auto& myEvent : aTrace.theEvents) {
    advance(myEvent.theTime);
    const auto& myRequest = myEvent.theRequest;

    if (myEvent.theType == EventType::Arrival) {
      const bool myInWindow =
          myEvent.theTime >= myStart and myEvent.theTime < myHorizon;
      auto myDecision = decide(
          aPolicy, myState, myRequest, myCache, myRng, aOptions.theWeights);
      LogEntry myEntry{myRequest.theId, myDecision.accepted(), 0, {}};
      if (myDecision.accepted()) {
        auto& myAssignment = *myDecision.theAssignment;
        myEntry.theEdge    = myAssignment.theEdge;
        myEntry.thePath    = myAssignment.thePath;
        myReservedSkr += myAssignment.theKeyRate * myAssignment.hops();
        myReservedCpu += myAssignment.theCpu;
        if (myInWindow) {
          myMetrics.theAccepted++;
          myHopsSum += myAssignment.hops();
        }
        try {
          myState.reserve(std::move(myAssignment));
        } catch (const std::invalid_argument& aErr) {
          throw std::logic_error(toString(aPolicy) +
                                 " admitted an infeasible assignment: " +
                                 aErr.what());
        }
      }
      if (myInWindow) {
        myMetrics.theOffered++;
      }
      ret.theLog.emplace_back(std::move(myEntry));

    } else if (myState.isActive(myRequest.theId)) {
      const auto myReleased = myState.release(myRequest.theId);
      myReservedSkr -= myReleased.theKeyRate * myReleased.hops();
      myReservedCpu -= myReleased.theCpu;
    }

    if (aOptions.theCheckEvery > 0 and
        ++myNumEvents % aOptions.theCheckEvery == 0) {
      myState.checkConservation();
    }
  }
  advance(myHorizon);

  // drain the requests whose departure is not in the trace
  for (const auto myId : myState.activeIds()) {
    myState.release(myId);
  }
  myState.checkConservation();
  if (myState.numActive() != 0) {
    throw std::logic_error("requests still active after draining");
  }

  const auto myDuration = myHorizon - myStart;
  if (myMetrics.theOffered > 0) {
    myMetrics.theAcceptanceRatio =
        static_cast<double>(myMetrics.theAccepted) / myMetrics.theOffered;
  }
  if (myMetrics.theAccepted > 0) {
    myMetrics.theMeanPathHops =
        static_cast<double>(myHopsSum) / myMetrics.theAccepted;
  }
  if (myDuration > 0) {
    myMetrics.theCarriedKeyRate = std::max(0.0, mySkrArea / myDuration);
    const auto myTotSkr         = aTopology->totalSkr();
    const auto myTotCpu         = aTopology->totalCpu();
    if (myTotSkr > 0) {
      myMetrics.theSkrUtilization =
          std::clamp(mySkrArea / (myDuration * myTotSkr), 0.0, 1.0);
    }
    if (myTotCpu > 0) {
      myMetrics.theCpuUtilization =
          std::clamp(myCpuArea / (myDuration * myTotCpu), 0.0, 1.0);
    }
  }
  return ret;
}

inline RunResult run(const QkdTopology& aTopology,
                     const EventTrace&  aTrace,
                     const PolicyId     aPolicy,
                     const std::size_t  aK,
                     const std::uint64_t aSeed,
                     const RunOptions&  aOptions = {}) {
  return run(std::make_shared<const QkdTopology>(aTopology),
             aTrace,
             aPolicy,
             aK,
             aSeed,
             aOptions);
}

/**
 * Independent replications: run i draws its trace and policy choices from
 * seed aBaseSeed + i. Runs are executed on up to aNumThreads threads (0 means
 * the hardware concurrency), results are ordered by run index.
 */
inline std::vector<RunMetrics> replicate(const QkdTopology&  aTopology,
                                         const WorkloadSpec& aSpec,
                                         const PolicyId      aPolicy,
                                         const std::size_t   aK,
                                         const std::size_t   aNumRuns,
                                         const std::uint64_t aBaseSeed,
                                         const RunOptions&   aOptions    = {},
                                         std::size_t         aNumThreads = 0) {
  if (aNumRuns == 0) {
    throw std::invalid_argument("Invalid zero replications");
  }
  aSpec.validate(aTopology);
  const auto myTopology = std::make_shared<const QkdTopology>(aTopology);

  std::vector<RunMetrics>         ret(aNumRuns);
  std::vector<std::exception_ptr> myErrors(aNumRuns);
  const auto                      myWork = [&](const std::size_t i) {
    try {
      auto mySpec    = aSpec;
      mySpec.theSeed = aBaseSeed + i;
      const auto myTrace = generateTrace(*myTopology, mySpec);
      ret[i] = run(myTopology, myTrace, aPolicy, aK, mySpec.theSeed, aOptions)
                   .theMetrics;
    } catch (...) {
      myErrors[i] = std::current_exception();
    }
  };

  if (aNumThreads == 0) {
    aNumThreads = std::max(1u, std::thread::hardware_concurrency());
  }
  aNumThreads = std::min(aNumThreads, aNumRuns);
  if (aNumThreads == 1) {
    for (std::size_t i = 0; i < aNumRuns; i++) {
      myWork(i);
    }
  } else {
    std::vector<std::thread> myThreads;
    for (std::size_t t = 0; t < aNumThreads; t++) {
      myThreads.emplace_back([&, t]() {
        for (auto i = t; i < aNumRuns; i += aNumThreads) {
          myWork(i);
        }
      });
    }
    for (auto& myThread : myThreads) {
      myThread.join();
    }
  }

  for (const auto& myError : myErrors) {
    if (myError) {
      std::rethrow_exception(myError);
    }
  }
  return ret;
}

} // namespace qkdedge
} // namespace uiiit
