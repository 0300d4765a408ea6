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

#include "qkdedge/workload.hpp"

#include "testutil.hpp"

#include "gtest/gtest.h"

#include <cmath>

namespace uiiit {
namespace qkdedge {

TEST(TestWorkload, test_distribution_parse) {
  EXPECT_EQ(Distribution::deterministic(2.5), Distribution::parse("DETERMINISTIC(2.5)"));
  EXPECT_EQ(Distribution::uniform(1, 3), Distribution::parse(" uniform( 1 , 3 ) "));
  EXPECT_EQ(Distribution::exponential(4), Distribution::parse("Exponential(4)"));
  EXPECT_DOUBLE_EQ(2, Distribution::parse("UNIFORM(1,3)").mean());

  for (const auto mySpec : {"UNIFORM(1)",
                            "DETERMINISTIC(1,2)",
                            "EXPONENTIAL(0)",
                            "UNIFORM(3,1)",
                            "UNIFORM(0,1)",
                            "DETERMINISTIC(-1)",
                            "GAUSSIAN(1,1)",
                            "DETERMINISTIC(1x)",
                            "DETERMINISTIC"}) {
    EXPECT_THROW(Distribution::parse(mySpec), std::invalid_argument) << mySpec;
  }
}

TEST(TestWorkload, test_distribution_samples) {
  auto myRng = makeRng(1, "test");
  for (const auto& myDist : {Distribution::uniform(0.5, 1.5),
                             Distribution::exponential(2)}) {
    double mySum = 0;
    for (int i = 0; i < 100000; i++) {
      const auto x = myDist(myRng);
      ASSERT_GT(x, 0);
      mySum += x;
    }
    // standard error is at most 2 / sqrt(1e5) ~ 0.0063
    EXPECT_NEAR(myDist.mean(), mySum / 100000, 0.03);
  }
  EXPECT_DOUBLE_EQ(7, Distribution::deterministic(7)(myRng));
}

TEST(TestWorkload, test_streams) {
  EXPECT_EQ(makeRng(5, "trace"), makeRng(5, "trace"));
  EXPECT_NE(makeRng(5, "trace")(), makeRng(5, "policy")());
  EXPECT_NE(makeRng(5, "trace")(), makeRng(6, "trace")());
}

TEST(TestWorkload, test_trace_determinism) {
  const auto   myTopology = test::lineTopology();
  WorkloadSpec mySpec;
  mySpec.theArrivalRate = 3;
  mySpec.theHorizon     = 100;
  mySpec.theCpu         = Distribution::uniform(1, 2);
  mySpec.theSeed        = 99;
  const auto myTrace1   = generateTrace(myTopology, mySpec);
  const auto myTrace2   = generateTrace(myTopology, mySpec);
  ASSERT_EQ(myTrace1.theEvents.size(), myTrace2.theEvents.size());
  EXPECT_EQ(myTrace1.requests(), myTrace2.requests());

  mySpec.theSeed = 100;
  EXPECT_NE(myTrace1.requests(), generateTrace(myTopology, mySpec).requests());
}

TEST(TestWorkload, test_trace_invariants) {
  const auto   myTopology = test::lineTopology();
  WorkloadSpec mySpec;
  mySpec.theArrivalRate = 5;
  mySpec.theMeanHolding = 0.5;
  mySpec.theHorizon     = 200;
  mySpec.theKeyRate     = Distribution::exponential(1);
  const auto myTrace    = generateTrace(myTopology, mySpec);

  std::map<RequestId, double> myArrivals;
  RequestId                   myNextId = 0;
  for (std::size_t i = 0; i < myTrace.theEvents.size(); i++) {
    const auto& e = myTrace.theEvents[i];
    if (i > 0) {
      ASSERT_FALSE(e < myTrace.theEvents[i - 1]);
    }
    if (e.theType == EventType::Arrival) {
      ASSERT_EQ(myNextId++, e.theRequest.theId);
      ASSERT_LT(e.theTime, mySpec.theHorizon);
      ASSERT_LT(e.theRequest.theAttachment, myTopology.numNodes());
      ASSERT_NO_THROW(e.theRequest.validate());
      myArrivals[e.theRequest.theId] = e.theTime;
    } else {
      ASSERT_EQ(1u, myArrivals.count(e.theRequest.theId));
      ASSERT_EQ(myArrivals[e.theRequest.theId] + e.theRequest.theHolding,
                e.theTime);
    }
  }
  EXPECT_EQ(myNextId, myTrace.numArrivals());
}

TEST(TestWorkload, test_departure_before_arrival) {
  const auto myTrace = makeTrace(
      {test::request(0, 0, 1, 1, 0, 2), test::request(1, 0, 1, 1, 2, 1)}, 10);
  ASSERT_EQ(4u, myTrace.theEvents.size());
  EXPECT_EQ(EventType::Arrival, myTrace.theEvents[0].theType);
  EXPECT_EQ(EventType::Departure, myTrace.theEvents[1].theType);
  EXPECT_EQ(0u, myTrace.theEvents[1].theRequest.theId);
  EXPECT_EQ(EventType::Arrival, myTrace.theEvents[2].theType);

  // ids must increase with arrival times
  EXPECT_THROW(makeTrace({test::request(1, 0, 1, 1, 0), test::request(0, 0, 1, 1, 1)}, 10),
               std::invalid_argument);
  EXPECT_THROW(makeTrace({test::request(0, 0, 1, 1, 0), test::request(0, 0, 1, 1, 1)}, 10),
               std::invalid_argument);
  EXPECT_THROW(makeTrace({test::request(0, 0, 0, 1, 0)}, 10), std::invalid_argument);
}

TEST(TestWorkload, test_empty_trace) {
  WorkloadSpec mySpec;
  mySpec.theHorizon = 0;
  EXPECT_TRUE(generateTrace(test::lineTopology(), mySpec).theEvents.empty());
}

TEST(TestWorkload, test_invalid_spec) {
  const auto   myTopology = test::lineTopology();
  WorkloadSpec mySpec;
  mySpec.theArrivalRate = 0;
  EXPECT_THROW(generateTrace(myTopology, mySpec), std::invalid_argument);
  mySpec                = WorkloadSpec();
  mySpec.theMeanHolding = -1;
  EXPECT_THROW(generateTrace(myTopology, mySpec), std::invalid_argument);
  mySpec                      = WorkloadSpec();
  mySpec.theAttachmentWeights = {1, 1};
  EXPECT_THROW(generateTrace(myTopology, mySpec), std::invalid_argument);
  mySpec.theAttachmentWeights = {0, 0, 0, 0};
  EXPECT_THROW(generateTrace(myTopology, mySpec), std::invalid_argument);
}

TEST(TestWorkload, test_attachment_weights) {
  const auto   myTopology = test::lineTopology();
  WorkloadSpec mySpec;
  mySpec.theArrivalRate       = 10;
  mySpec.theHorizon           = 100;
  mySpec.theAttachmentWeights = {0, 0, 1, 0};
  for (const auto& myRequest : generateTrace(myTopology, mySpec).requests()) {
    ASSERT_EQ(2u, myRequest.theAttachment);
  }
}

TEST(TestWorkload, test_poisson_count) {
  // lambda * horizon = 20000, sigma = sqrt(20000) ~ 141.4
  WorkloadSpec mySpec;
  mySpec.theArrivalRate = 2;
  mySpec.theHorizon     = 10000;
  mySpec.theSeed        = 12345;
  const auto myCount = generateTrace(test::lineTopology(), mySpec).numArrivals();
  EXPECT_NEAR(20000.0, static_cast<double>(myCount), 3 * std::sqrt(20000.0));
}

} // namespace qkdedge
} // namespace uiiit
