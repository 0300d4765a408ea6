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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
// if any criterion fails.

#include "qkdedge/experiment.hpp"
#include "qkdedge/networkstate.hpp"
#include "qkdedge/oracle.hpp"
#include "qkdedge/paths.hpp"
#include "qkdedge/simulation.hpp"
#include "qkdedge/topologyfactory.hpp"

#include "csvutil.hpp"
#include "testutil.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace uiiit::qkdedge;

namespace {

struct Outcome {
  bool        thePassed;
  std::string theDetail;
};

class Stopwatch
{
 public:
  Stopwatch()
      : theStart(std::chrono::steady_clock::now()) {
  }
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         theStart)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point theStart;
};

double mean(const std::vector<RunMetrics>& aRuns) {
  double ret = 0;
  for (const auto& m : aRuns) {
    ret += m.theAcceptanceRatio;
  }
  return ret / aRuns.size();
}

// 2 nodes, 1 link, 1 edge node, unit capacities and demands: M/M/1/1
Outcome erlangB() {
  constexpr double kTol         = 0.01;
  constexpr double kMaxSeconds  = 60;
  constexpr double kHoldings    = 2e5;
  constexpr int    kNumRuns     = 20;
  const QkdTopology myTopology(2, {{0, 1, 1}}, {{0, 1}});

  Stopwatch          myWatch;
  bool               myPassed = true;
  std::stringstream  myDetail;
  for (const double myRho : {0.5, 1.0, 2.0}) {
    WorkloadSpec mySpec;
    mySpec.theArrivalRate = myRho;
    mySpec.theMeanHolding = 1;
    mySpec.theKeyRate     = Distribution::deterministic(1);
    mySpec.theCpu         = Distribution::deterministic(1);
    mySpec.theHorizon     = kHoldings * mySpec.theMeanHolding;
    const auto myRuns     = replicate(
        myTopology, mySpec, PolicyId::GreedyFirstFit, 3, kNumRuns, 1000);
    const auto myBlocking = 1 - mean(myRuns);
    const auto myExpected = myRho / (1 + myRho);
    myPassed = myPassed and std::abs(myBlocking - myExpected) <= kTol;
    myDetail << "rho=" << myRho << " blocking " << std::setprecision(4)
             << myBlocking << " vs " << myExpected << "; ";
  }
  const auto myTime = myWatch.seconds();
  myPassed          = myPassed and myTime < kMaxSeconds;
  myDetail << std::setprecision(3) << myTime << " s";
  return {myPassed, myDetail.str()};
}

Outcome oracleDominance() {
  constexpr int    kNumInstances = 200;
  constexpr double kMaxSeconds   = 300;
  std::mt19937     myRng(2023);
  RunOptions       myOptions;
  myOptions.theWarmupFraction = 0;

  Stopwatch   myWatch;
  std::size_t myViolations = 0;
  std::size_t myGap        = 0;
  for (int i = 0; i < kNumInstances; i++) {
    const auto myInstance = test::randomInstance(myRng, 1 + i % 8);
    const auto myOptimum  = offlineOptimum(myInstance).theMaxAccepted;
    for (const auto myPolicy : allPolicies()) {
      const auto myAccepted = run(myInstance.theTopology,
                                  makeTrace(myInstance.theRequests, 100),
                                  myPolicy,
                                  3,
                                  i,
                                  myOptions)
                                  .theMetrics.theAccepted;
      if (myAccepted > myOptimum) {
        myViolations++;
      }
      myGap += myOptimum - std::min(myOptimum, myAccepted);
    }
  }
  const auto        myTime = myWatch.seconds();
  std::stringstream myDetail;
  myDetail << myViolations << " violations over " << kNumInstances
           << " instances x " << allPolicies().size()
           << " policies (total gap " << myGap << " requests); "
           << std::setprecision(3) << myTime << " s";
  return {myViolations == 0 and myTime < kMaxSeconds, myDetail.str()};
}

Outcome conservation() {
  constexpr std::size_t kNumOps = 1000000;
  std::mt19937_64       myRng(77);
  std::uniform_real_distribution<double> myUnit(0, 1);

  const auto myTopology = std::make_shared<const QkdTopology>(
      QkdTopology(6,
                  {{0, 1, 10}, {1, 2, 7.5}, {2, 3, 12}, {3, 4, 9}, {4, 5, 11},
                   {5, 0, 8}, {0, 3, 6}, {1, 4, 10.25}},
                  {{0, 6}, {2, 5.5}, {4, 7}, {5, 4}}));
  PathCache    myPaths(myTopology, 0);
  NetworkState myState(myTopology);

  std::size_t myReserved   = 0;
  std::size_t myReleased   = 0;
  std::size_t myRejected   = 0;
  std::size_t myViolations = 0;
  std::size_t myUnsound    = 0;
  RequestId   myNextId     = 0;
  for (std::size_t i = 0; i < kNumOps; i++) {
    if (myUnit(myRng) < 0.5 or myState.numActive() == 0) {
      const auto myAttachment =
          static_cast<NodeId>(myRng() % myTopology->numNodes());
      const auto  myEdge  = myRng() % myTopology->edges().size();
      const auto& myCands = myPaths.paths(myAttachment, myEdge);
      const auto& myPath  = myCands[myRng() % myCands.size()].thePath;
      const auto  myReq   = test::request(myNextId++,
                                       myAttachment,
                                       0.05 + 2 * myUnit(myRng),
                                       0.05 + myUnit(myRng));
      const auto  myLocation = myTopology->edges()[myEdge].theLocation;
      const bool  myFeasible = myState.feasible(myReq, myLocation, myPath);
      try {
        myState.reserve(Assignment::make(myReq, myLocation, myPath));
        myReserved++;
        myUnsound += myFeasible ? 0 : 1;
      } catch (const std::invalid_argument&) {
        myRejected++;
        myUnsound += myFeasible ? 1 : 0;
      }
    } else {
      const auto myIds = myState.activeIds();
      myState.release(myIds[myRng() % myIds.size()]);
      myReleased++;
    }
    if (myState.conservationViolation()) {
      myViolations++;
    }
  }
  for (const auto myId : myState.activeIds()) {
    myState.release(myId);
  }
  double myMaxDiff = 0;
  for (std::size_t l = 0; l < myTopology->links().size(); l++) {
    myMaxDiff = std::max(
        myMaxDiff, std::abs(myTopology->links()[l].theSkr - myState.residualSkr()[l]));
  }
  for (std::size_t e = 0; e < myTopology->edges().size(); e++) {
    myMaxDiff = std::max(
        myMaxDiff, std::abs(myTopology->edges()[e].theCpu - myState.residualCpu()[e]));
  }
  std::stringstream myDetail;
  myDetail << kNumOps << " ops (" << myReserved << " reserve, " << myRejected
           << " infeasible, " << myReleased << " release), " << myViolations
           << " conservation violations, " << myUnsound
           << " feasibility mismatches, max drift after drain " << myMaxDiff;
  return {myViolations == 0 and myUnsound == 0 and myMaxDiff <= kTolerance,
          myDetail.str()};
}

Outcome pathfinding() {
  constexpr int kNumGraphs = 500;
  std::mt19937  myRng(8);
  std::size_t   myChecks     = 0;
  std::size_t   myMismatches = 0;
  for (int i = 0; i < kNumGraphs; i++) {
    const auto myTopology =
        test::randomTopology(myRng, 8, 0.25 + 0.1 * (i % 6));
    const auto n = myTopology.numNodes();
    for (NodeId o = 0; o < n; o++) {
      for (NodeId t = 0; t < n; t++) {
        const auto myAll = test::bruteForcePaths(myTopology, o, t);
        for (std::size_t k : {1, 3, 8}) {
          const std::vector<Path> myExpected(
              myAll.begin(), myAll.begin() + std::min(k, myAll.size()));
          myChecks++;
          if (kShortestPaths(myTopology, o, t, k).thePaths != myExpected) {
            myMismatches++;
          }
        }
      }
    }
  }
  std::stringstream myDetail;
  myDetail << myMismatches << " mismatches over " << myChecks
           << " (graph, origin, target, k) queries on " << kNumGraphs
           << " graphs";
  return {myMismatches == 0, myDetail.str()};
}

Outcome policyOrdering() {
  constexpr double kSlack   = 0.02;
  constexpr int    kNumRuns = 20;
  // scarce cpu: 6 edge nodes with 4 units each, abundant key rate
  const auto   myTopology = makeGrid(4, 4, 1000, 3, 4);
  WorkloadSpec mySpec;
  mySpec.theMeanHolding = 1;
  mySpec.theKeyRate     = Distribution::deterministic(1);
  mySpec.theCpu         = Distribution::uniform(0.5, 3.5);
  mySpec.theHorizon     = 500;

  bool              myPassed = true;
  std::stringstream myDetail;
  // offered cpu load 0.5, 1, 2 times the total capacity (24)
  for (const double myLambda : {6.0, 12.0, 24.0}) {
    mySpec.theArrivalRate = myLambda;
    const auto myBest =
        mean(replicate(myTopology, mySpec, PolicyId::BestFit, 3, kNumRuns, 500));
    const auto myRandom = mean(
        replicate(myTopology, mySpec, PolicyId::RandomFit, 3, kNumRuns, 500));
    myPassed = myPassed and myBest >= myRandom - kSlack;
    myDetail << "lambda=" << myLambda << " best " << std::setprecision(4)
             << myBest << " random " << myRandom << "; ";
  }
  return {myPassed, myDetail.str()};
}

Outcome determinism() {
  namespace fs        = std::filesystem;
  const auto myDir    = fs::temp_directory_path() / "qkdedge_acceptance";
  fs::remove_all(myDir);

  auto myConfig = ExperimentConfig::fromJson(nlohmann::json::parse(R"json({
    "topology": "GRID(4,4,10,2,4)",
    "workload": {"arrival_rate": 8, "mean_holding": 1,
                 "key_rate": "UNIFORM(0.5,4)", "cpu": "EXPONENTIAL(1)",
                 "horizon": 300, "seed": 11},
    "policies": ["GREEDY_FIRST_FIT", "BEST_FIT", "LOAD_BALANCE", "RANDOM_FIT"],
    "n_runs": 4,
    "sweep": {"param": "arrival_rate", "values": [4, 8, 16]}
  })json"));
  std::stringstream myOut;
  myConfig.theOutput = (myDir / "first").string();
  runExperiment(myConfig, {false, false, 1}, myOut, myOut);
  myConfig.theOutput = (myDir / "second").string();
  runExperiment(myConfig, {false, false, 0}, myOut, myOut);

  const auto myFirst  = test::slurp(myDir / "first" / "runs.csv");
  const auto mySecond = test::slurp(myDir / "second" / "runs.csv");
  fs::remove_all(myDir);
  std::stringstream myDetail;
  myDetail << myFirst.size() << " bytes, "
           << std::count(myFirst.begin(), myFirst.end(), '\n') - 1
           << " rows, identical: " << (myFirst == mySecond ? "yes" : "no");
  return {not myFirst.empty() and myFirst == mySecond, myDetail.str()};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> myCriteria(
      {{"erlang-b reduction", erlangB},
       {"oracle dominance", oracleDominance},
       {"conservation suite", conservation},
       {"pathfinding oracle", pathfinding},
       {"policy ordering sanity", policyOrdering},
       {"determinism", determinism}});

  int myFailures = 0;
  for (const auto& [myName, myCriterion] : myCriteria) {
    Outcome myOutcome{false, ""};
    try {
      myOutcome = myCriterion();
    } catch (const std::exception& aErr) {
      myOutcome = {false, std::string("exception: ") + aErr.what()};
    }
    std::cout << (myOutcome.thePassed ? "PASS " : "FAIL ") << myName << ": "
              << myOutcome.theDetail << std::endl;
    myFailures += myOutcome.thePassed ? 0 : 1;
  }
  return myFailures == 0 ? 0 : 1;
}
