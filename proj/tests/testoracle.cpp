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

#include "qkdedge/oracle.hpp"
#include "qkdedge/simulation.hpp"

#include "testutil.hpp"

#include "gtest/gtest.h"

#include <random>

namespace uiiit {
namespace qkdedge {

namespace {

std::vector<RequestId> ids(const OfflineResult& aResult) {
  std::vector<RequestId> ret;
  for (const auto& a : aResult.theWitness) {
    ret.push_back(a.theRequest);
  }
  return ret;
}

// replay the witness through reserve/release in time order
void replay(const OfflineInstance& aInstance, const OfflineResult& aResult) {
  std::vector<AppRequest> myAccepted;
  for (const auto& a : aResult.theWitness) {
    for (const auto& r : aInstance.theRequests) {
      if (r.theId == a.theRequest) {
        myAccepted.push_back(r);
      }
    }
  }
  const auto   myTrace = makeTrace(myAccepted, 1e9);
  NetworkState myState(aInstance.theTopology);
  for (const auto& e : myTrace.theEvents) {
    if (e.theType == EventType::Arrival) {
      const auto it = std::find_if(
          aResult.theWitness.begin(), aResult.theWitness.end(), [&](auto& a) {
            return a.theRequest == e.theRequest.theId;
          });
      ASSERT_TRUE(myState.feasible(e.theRequest, it->theEdge, it->thePath));
      myState.reserve(*it);
    } else {
      myState.release(e.theRequest.theId);
    }
    ASSERT_FALSE(myState.conservationViolation());
  }
}

} // namespace

TEST(TestOracle, test_empty) {
  const auto myResult = offlineOptimum(
      {std::make_shared<const QkdTopology>(test::lineTopology()), {}, 0, {}});
  EXPECT_EQ(0u, myResult.theMaxAccepted);
  EXPECT_TRUE(myResult.theWitness.empty());
}

TEST(TestOracle, test_unit_edge) {
  // all on [0, 10) on a unit co-located edge node: subsets of size 2 or 3
  // never fit, any singleton does
  const auto myTopology = std::make_shared<const QkdTopology>(
      QkdTopology(1, {}, {{0, 1}}));
  const OfflineInstance myInstance{myTopology,
                                   {test::request(0, 0, 1, 1, 0, 10),
                                    test::request(1, 0, 1, 1, 0, 10),
                                    test::request(2, 0, 1, 1, 0, 10)},
                                   0,
                                   {}};
  const auto myResult = offlineOptimum(myInstance);
  EXPECT_EQ(1u, myResult.theMaxAccepted);
  EXPECT_EQ(std::vector<RequestId>({0}), ids(myResult));
  replay(myInstance, myResult);
}

TEST(TestOracle, test_any_two) {
  const auto myTopology = std::make_shared<const QkdTopology>(
      QkdTopology(1, {}, {{0, 2}}));
  const OfflineInstance myInstance{myTopology,
                                   {test::request(0, 0, 1, 1, 0, 10),
                                    test::request(1, 0, 1, 1, 1, 10),
                                    test::request(2, 0, 1, 1, 2, 10)},
                                   0,
                                   {}};
  const auto myResult = offlineOptimum(myInstance);
  EXPECT_EQ(2u, myResult.theMaxAccepted);
  EXPECT_EQ(std::vector<RequestId>({0, 1}), ids(myResult));
  replay(myInstance, myResult);
}

TEST(TestOracle, test_clairvoyance) {
  // a long request first, then two short ones that need the whole edge
  // node: rejecting the first one is better, which no online policy does
  const auto myTopology = std::make_shared<const QkdTopology>(
      QkdTopology(1, {}, {{0, 2}}));
  const OfflineInstance myInstance{myTopology,
                                   {test::request(0, 0, 1, 1, 0, 100),
                                    test::request(1, 0, 1, 2, 1, 1),
                                    test::request(2, 0, 1, 2, 3, 1)},
                                   0,
                                   {}};
  const auto myResult = offlineOptimum(myInstance);
  EXPECT_EQ(2u, myResult.theMaxAccepted);
  EXPECT_EQ(std::vector<RequestId>({1, 2}), ids(myResult));
  replay(myInstance, myResult);

  RunOptions myOptions;
  myOptions.theWarmupFraction = 0;
  const auto myOnline         = run(myTopology,
                            makeTrace(myInstance.theRequests, 200),
                            PolicyId::GreedyFirstFit,
                            3,
                            0,
                            myOptions);
  EXPECT_EQ(1u, myOnline.theMetrics.theAccepted);
}

TEST(TestOracle, test_path_choice) {
  // two requests from A to the edge node at C: the direct link only fits
  // one, the detour via B the other one
  const auto myTopology = std::make_shared<const QkdTopology>(
      QkdTopology(3, {{0, 2, 1}, {0, 1, 1}, {1, 2, 1}}, {{2, 10}}));
  const OfflineInstance myInstance{
      myTopology,
      {test::request(0, 0, 1, 1, 0, 10), test::request(1, 0, 1, 1, 0, 10)},
      0,
      {}};
  const auto myResult = offlineOptimum(myInstance);
  EXPECT_EQ(2u, myResult.theMaxAccepted);
  ASSERT_EQ(2u, myResult.theWitness.size());
  EXPECT_EQ(Path({0, 2}), myResult.theWitness[0].thePath);
  EXPECT_EQ(Path({0, 1, 2}), myResult.theWitness[1].thePath);
  replay(myInstance, myResult);

  // with a single candidate path only one fits
  auto myRestricted = myInstance;
  myRestricted.theK = 1;
  EXPECT_EQ(1u, offlineOptimum(myRestricted).theMaxAccepted);
}

TEST(TestOracle, test_weights) {
  const auto myTopology = std::make_shared<const QkdTopology>(
      QkdTopology(1, {}, {{0, 1}}));
  const OfflineInstance myInstance{myTopology,
                                   {test::request(0, 0, 1, 1, 0, 10),
                                    test::request(1, 0, 1, 1, 0, 10)},
                                   0,
                                   {1, 5}};
  const auto myResult = offlineOptimum(myInstance);
  EXPECT_EQ(1u, myResult.theMaxAccepted);
  EXPECT_DOUBLE_EQ(5, myResult.theValue);
  EXPECT_EQ(std::vector<RequestId>({1}), ids(myResult));
}

TEST(TestOracle, test_limits) {
  OfflineInstance myInstance{
      std::make_shared<const QkdTopology>(QkdTopology(1, {}, {{0, 1}})), {}, 0, {}};
  for (RequestId i = 0; i <= kOracleMaxRequests; i++) {
    myInstance.theRequests.push_back(test::request(i, 0, 1, 1, i, 1));
  }
  try {
    offlineOptimum(myInstance);
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& aErr) {
    EXPECT_EQ(std::string("instance exceeds oracle limit"), aErr.what());
  }
  // non-overlapping: all of them
  myInstance.theRequests.pop_back();
  EXPECT_EQ(kOracleMaxRequests, offlineOptimum(myInstance).theMaxAccepted);

  myInstance.theRequests.push_back(myInstance.theRequests.back());
  myInstance.theRequests.erase(myInstance.theRequests.begin());
  EXPECT_THROW(offlineOptimum(myInstance), std::invalid_argument);
}

// upper bound on online policies, witness validity, subset monotonicity
TEST(TestOracle, test_random_properties) {
  std::mt19937 myRng(31);
  RunOptions   myOptions;
  myOptions.theWarmupFraction = 0;
  for (int i = 0; i < 60; i++) {
    const auto myInstance = test::randomInstance(myRng, 1 + i % 8);
    const auto myResult   = offlineOptimum(myInstance);
    replay(myInstance, myResult);

    for (const auto myPolicy : allPolicies()) {
      const auto myOnline = run(myInstance.theTopology,
                                makeTrace(myInstance.theRequests, 100),
                                myPolicy,
                                3,
                                i,
                                myOptions);
      ASSERT_LE(myOnline.theMetrics.theAccepted, myResult.theMaxAccepted);
    }

    auto mySmaller = myInstance;
    mySmaller.theRequests.pop_back();
    ASSERT_LE(offlineOptimum(mySmaller).theMaxAccepted, myResult.theMaxAccepted);
  }
}

} // namespace qkdedge
} // namespace uiiit
