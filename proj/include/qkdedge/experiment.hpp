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

#include "qkdedge/oracle.hpp"
#include "qkdedge/policy.hpp"
#include "qkdedge/simulation.hpp"
#include "qkdedge/topology.hpp"
#include "qkdedge/topologyfactory.hpp"
#include "qkdedge/workload.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uiiit {
namespace qkdedge {

enum class SweepParam { None, ArrivalRate, K, SkrScale, CpuScale };

inline std::string toString(const SweepParam aParam) {
  switch (aParam) {
    case SweepParam::None:
      return "none";
    case SweepParam::ArrivalRate:
      return "arrival_rate";
    case SweepParam::K:
      return "k";
    case SweepParam::SkrScale:
      return "skr_scale";
    case SweepParam::CpuScale:
      return "cpu_scale";
  }
  throw std::runtime_error("Invalid sweep parameter");
}

inline SweepParam sweepParamFromString(const std::string& aName) {
  for (const auto myParam : {SweepParam::ArrivalRate,
                             SweepParam::K,
                             SweepParam::SkrScale,
                             SweepParam::CpuScale}) {
    if (toString(myParam) == aName) {
      return myParam;
    }
  }
  throw std::invalid_argument("Invalid sweep parameter: " + aName);
}

struct ExperimentConfig {
  //! Textual spec (see buildTopology()) or inline JSON topology.
  nlohmann::json        theTopology = "GRID(4,4,10,1,4)";
  WorkloadSpec          theWorkload;
  double                theWarmupFraction = 0.1;
  ScoreWeights          theWeights;
  std::vector<PolicyId> thePolicies = {PolicyId::GreedyFirstFit};
  std::size_t           theK        = 3;
  std::size_t           theNumRuns  = 1;
  SweepParam            theSweepParam = SweepParam::None;
  std::vector<double>   theSweepValues;
  std::string           theOutput = ".";

  QkdTopology topology() const {
    if (theTopology.is_string()) {
      return buildTopology(theTopology.get<std::string>());
    }
    return topologyFromJson(theTopology);
  }

  //! \throw std::invalid_argument if inconsistent.
  void validate() const {
    if (thePolicies.empty()) {
      throw std::invalid_argument("Invalid config: no policies");
    }
    if (theK == 0) {
      throw std::invalid_argument("Invalid config: k must be >= 1");
    }
    if (theNumRuns == 0) {
      throw std::invalid_argument("Invalid config: n_runs must be >= 1");
    }
    if (theSweepParam != SweepParam::None and theSweepValues.empty()) {
      throw std::invalid_argument("Invalid config: empty sweep");
    }
    for (const auto v : theSweepValues) {
      if (not std::isfinite(v) or v <= 0) {
        throw std::invalid_argument(
            "Invalid config: sweep values must be positive");
      }
      if (theSweepParam == SweepParam::K and v != std::floor(v)) {
        throw std::invalid_argument(
            "Invalid config: k sweep values must be integers");
      }
    }
    if (not(theWarmupFraction >= 0 and theWarmupFraction < 1)) {
      throw std::invalid_argument(
          "Invalid config: warmup_fraction must be in [0, 1)");
    }
  }

  /**
   * Parse from a JSON object like:
   *
   * {
   *   "topology": "GRID(4,4,10,1,4)",
   *   "workload": {"arrival_rate": 2, "mean_holding": 1,
   *                "key_rate": "DETERMINISTIC(1)", "cpu": "UNIFORM(0.5,1.5)",
   *                "horizon": 1000, "seed": 1, "warmup_fraction": 0.1},
   *   "policies": ["BEST_FIT", "RANDOM_FIT"],
   *   "k": 3, "n_runs": 10,
   *   "sweep": {"param": "arrival_rate", "values": [1, 2, 4]},
   *   "score_weights": {"cpu": 1, "key": 1},
   *   "output": "results"
   * }
   *
   * Only "topology" and "workload" are mandatory.
   */
  static ExperimentConfig fromJson(const nlohmann::json& aJson) {
    const auto fail = [](const std::string& aWhat) {
      throw std::invalid_argument("Invalid config: " + aWhat);
    };
    const auto checkKeys = [&fail](const nlohmann::json&           aObject,
                                   const std::string&              aWhere,
                                   std::initializer_list<const char*> aKeys) {
      if (not aObject.is_object()) {
        fail(aWhere + " is not a JSON object");
      }
      for (const auto& myItem : aObject.items()) {
        bool myFound = false;
        for (const auto myKey : aKeys) {
          myFound = myFound or myItem.key() == myKey;
        }
        if (not myFound) {
          fail("unknown field '" + aWhere + "." + myItem.key() + "'");
        }
      }
    };
    const auto number = [&fail](const nlohmann::json& aObject,
                                const std::string&    aKey,
                                const std::string&    aWhere) {
      if (not aObject[aKey].is_number()) {
        fail(aWhere + "." + aKey + " is not a number");
      }
      return aObject[aKey].get<double>();
    };
    const auto count = [&fail](const nlohmann::json& aObject,
                               const std::string&    aKey,
                               const std::string&    aWhere) {
      if (not aObject[aKey].is_number_integer() or
          aObject[aKey].get<std::int64_t>() < 0) {
        fail(aWhere + "." + aKey + " is not a non-negative integer");
      }
      return aObject[aKey].get<std::uint64_t>();
    };
    const auto distribution = [&fail](const nlohmann::json& aObject,
                                      const std::string&    aKey,
                                      const std::string&    aWhere) {
      if (not aObject[aKey].is_string()) {
        fail(aWhere + "." + aKey + " is not a string");
      }
      try {
        return Distribution::parse(aObject[aKey].get<std::string>());
      } catch (const std::invalid_argument& aErr) {
        fail(aWhere + "." + aKey + ": " + aErr.what());
      }
      return Distribution::deterministic(1);
    };

    checkKeys(aJson,
              "config",
              {"topology",
               "workload",
               "policies",
               "k",
               "n_runs",
               "sweep",
               "score_weights",
               "output"});

    ExperimentConfig ret;
    if (not aJson.contains("topology")) {
      fail("missing field 'topology'");
    }
    ret.theTopology = aJson["topology"];
    if (not ret.theTopology.is_string() and not ret.theTopology.is_object()) {
      fail("topology must be a spec string or a JSON object");
    }

    if (not aJson.contains("workload")) {
      fail("missing field 'workload'");
    }
    const auto& myWorkload = aJson["workload"];
    checkKeys(myWorkload,
              "workload",
              {"arrival_rate",
               "mean_holding",
               "key_rate",
               "cpu",
               "attachment",
               "horizon",
               "seed",
               "warmup_fraction"});
    for (const auto myKey :
         {"arrival_rate", "mean_holding", "key_rate", "cpu", "horizon"}) {
      if (not myWorkload.contains(myKey)) {
        fail(std::string("missing field 'workload.") + myKey + "'");
      }
    }
    auto& mySpec           = ret.theWorkload;
    mySpec.theArrivalRate  = number(myWorkload, "arrival_rate", "workload");
    mySpec.theMeanHolding  = number(myWorkload, "mean_holding", "workload");
    mySpec.theKeyRate      = distribution(myWorkload, "key_rate", "workload");
    mySpec.theCpu          = distribution(myWorkload, "cpu", "workload");
    mySpec.theHorizon      = number(myWorkload, "horizon", "workload");
    if (myWorkload.contains("seed")) {
      mySpec.theSeed = count(myWorkload, "seed", "workload");
    }
    if (myWorkload.contains("warmup_fraction")) {
      ret.theWarmupFraction =
          number(myWorkload, "warmup_fraction", "workload");
    }
    if (myWorkload.contains("attachment")) {
      const auto& myAttachment = myWorkload["attachment"];
      if (myAttachment.is_string() and
          myAttachment.get<std::string>() == "UNIFORM") {
        // default
      } else if (myAttachment.is_array()) {
        for (std::size_t i = 0; i < myAttachment.size(); i++) {
          if (not myAttachment[i].is_number()) {
            fail("workload.attachment[" + std::to_string(i) +
                 "] is not a number");
          }
          mySpec.theAttachmentWeights.push_back(
              myAttachment[i].get<double>());
        }
      } else {
        fail("workload.attachment must be \"UNIFORM\" or an array of weights");
      }
    }

    if (aJson.contains("policies")) {
      const auto& myPolicies = aJson["policies"];
      if (not myPolicies.is_array()) {
        fail("policies is not an array");
      }
      ret.thePolicies.clear();
      for (const auto& myName : myPolicies) {
        if (not myName.is_string()) {
          fail("policies must be strings");
        }
        try {
          ret.thePolicies.push_back(
              policyFromString(myName.get<std::string>()));
        } catch (const std::invalid_argument& aErr) {
          fail(aErr.what());
        }
      }
    }
    if (aJson.contains("k")) {
      ret.theK = count(aJson, "k", "config");
    }
    if (aJson.contains("n_runs")) {
      ret.theNumRuns = count(aJson, "n_runs", "config");
    }
    if (aJson.contains("sweep")) {
      const auto& mySweep = aJson["sweep"];
      checkKeys(mySweep, "sweep", {"param", "values"});
      if (not mySweep.contains("param") or not mySweep["param"].is_string()) {
        fail("sweep.param is not a string");
      }
      try {
        ret.theSweepParam =
            sweepParamFromString(mySweep["param"].get<std::string>());
      } catch (const std::invalid_argument& aErr) {
        fail(aErr.what());
      }
      if (not mySweep.contains("values") or not mySweep["values"].is_array()) {
        fail("sweep.values is not an array");
      }
      for (const auto& myValue : mySweep["values"]) {
        if (not myValue.is_number()) {
          fail("sweep.values must be numbers");
        }
        ret.theSweepValues.push_back(myValue.get<double>());
      }
    }
    if (aJson.contains("score_weights")) {
      const auto& myWeights = aJson["score_weights"];
      checkKeys(myWeights, "score_weights", {"cpu", "key"});
      if (myWeights.contains("cpu")) {
        ret.theWeights.theCpu = number(myWeights, "cpu", "score_weights");
      }
      if (myWeights.contains("key")) {
        ret.theWeights.theKey = number(myWeights, "key", "score_weights");
      }
    }
    if (aJson.contains("output")) {
      if (not aJson["output"].is_string()) {
        fail("output is not a string");
      }
      ret.theOutput = aJson["output"].get<std::string>();
    }
    ret.validate();
    return ret;
  }

  static ExperimentConfig fromFile(const std::string& aPath) {
    std::ifstream myFile(aPath);
    if (not myFile) {
      throw std::invalid_argument("Cannot read config file: " + aPath);
    }
    try {
      return fromJson(nlohmann::json::parse(myFile));
    } catch (const nlohmann::json::parse_error& aErr) {
      throw std::invalid_argument("Malformed config file " + aPath + ": " +
                                  aErr.what());
    }
  }
};

//! Column names of runs.csv, without the optional oracle column.
inline const std::vector<std::string>& runsColumns() {
  static const std::vector<std::string> ret({"sweep_param",
                                             "sweep_value",
                                             "policy",
                                             "run_index",
                                             "seed",
                                             "offered",
                                             "accepted",
                                             "acceptance_ratio",
                                             "carried_key_rate",
                                             "cpu_utilization",
                                             "skr_utilization",
                                             "mean_path_hops"});
  return ret;
}

//! Metrics summarized in summary.csv, in order.
inline const std::vector<std::string>& metricColumns() {
  static const std::vector<std::string> ret({"offered",
                                             "accepted",
                                             "acceptance_ratio",
                                             "carried_key_rate",
                                             "cpu_utilization",
                                             "skr_utilization",
                                             "mean_path_hops"});
  return ret;
}

//! 9 significant digits.
inline std::string formatValue(const double aValue) {
  char myBuf[64];
  std::snprintf(myBuf, sizeof(myBuf), "%.9g", aValue);
  return myBuf;
}

//! Enough digits to read back the same double.
inline std::string formatExact(const double aValue) {
  char myBuf[64];
  std::snprintf(myBuf, sizeof(myBuf), "%.17g", aValue);
  return myBuf;
}

struct ExperimentOptions {
  bool        theOracle     = false;
  bool        theVerbose    = false;
  std::size_t theNumThreads = 0; //!< 0 means the hardware concurrency
};

//! One row of runs.csv.
struct RunRecord {
  std::string                theSweepValue;
  PolicyId                   thePolicy;
  std::size_t                theRunIndex;
  std::uint64_t              theSeed;
  RunMetrics                 theMetrics;
  std::optional<std::size_t> theOfflineOptimum;
};

/**
 * Run all the (sweep value, policy) cells of aConfig, aConfig.theNumRuns
 * replications each, then write runs.csv and summary.csv to
 * aConfig.theOutput and a summary line per cell on aOut. Warnings and
 * verbose output go to aLog.
 *
 * \throw std::invalid_argument if the config is invalid.
 * \throw std::runtime_error if the output cannot be written.
 */
inline std::vector<RunRecord> runExperiment(const ExperimentConfig&  aConfig,
                                            const ExperimentOptions& aOptions,
                                            std::ostream&            aOut,
                                            std::ostream&            aLog) {
  aConfig.validate();
  const auto myBaseTopology = aConfig.topology();
  if (not myBaseTopology.connected()) {
    aLog << "warning: the QKD network is not connected\n";
  }
  aConfig.theWorkload.validate(myBaseTopology);

  namespace fs = std::filesystem;
  const fs::path  myOutDir(aConfig.theOutput);
  std::error_code myErr;
  fs::create_directories(myOutDir, myErr);
  if (myErr or not fs::is_directory(myOutDir)) {
    throw std::runtime_error("Cannot create output directory " +
                             myOutDir.string());
  }
  std::ofstream myRunsFile(myOutDir / "runs.csv", std::ios::binary);
  std::ofstream mySummaryFile(myOutDir / "summary.csv", std::ios::binary);
  if (not myRunsFile or not mySummaryFile) {
    throw std::runtime_error("Cannot write to output directory " +
                             myOutDir.string());
  }

  RunOptions myRunOptions;
  myRunOptions.theWarmupFraction = aConfig.theWarmupFraction;
  myRunOptions.theWeights        = aConfig.theWeights;

  std::vector<std::optional<double>> mySweep;
  if (aConfig.theSweepParam == SweepParam::None) {
    mySweep.emplace_back(std::nullopt);
  } else {
    for (const auto v : aConfig.theSweepValues) {
      mySweep.emplace_back(v);
    }
  }

  std::vector<RunRecord> ret;
  std::stringstream      mySummary;
  mySummary << "sweep_param,sweep_value,policy,n_runs";
  for (const auto& myColumn : metricColumns()) {
    mySummary << ',' << myColumn << "_mean," << myColumn << "_std";
  }
  mySummary << '\n';

  for (const auto& myValue : mySweep) {
    auto        myTopology = myBaseTopology;
    auto        mySpec     = aConfig.theWorkload;
    auto        myK        = aConfig.theK;
    std::string myValueString;
    if (myValue) {
      myValueString = formatValue(*myValue);
      switch (aConfig.theSweepParam) {
        case SweepParam::ArrivalRate:
          mySpec.theArrivalRate = *myValue;
          break;
        case SweepParam::K:
          myK = static_cast<std::size_t>(*myValue);
          break;
        case SweepParam::SkrScale:
          myTopology = myBaseTopology.scaled(*myValue, 1);
          break;
        case SweepParam::CpuScale:
          myTopology = myBaseTopology.scaled(1, *myValue);
          break;
        case SweepParam::None:
          break;
      }
    }

    // the offline optimum does not depend on the policy
    std::vector<std::optional<std::size_t>> myOptima(aConfig.theNumRuns);
    if (aOptions.theOracle) {
      const auto myShared = std::make_shared<const QkdTopology>(myTopology);
      for (std::size_t i = 0; i < aConfig.theNumRuns; i++) {
        auto myRunSpec    = mySpec;
        myRunSpec.theSeed = mySpec.theSeed + i;
        const auto myRequests =
            generateTrace(myTopology, myRunSpec).requests();
        if (myRequests.size() <= kOracleMaxRequests) {
          myOptima[i] =
              offlineOptimum(OfflineInstance{myShared, myRequests, 0, {}})
                  .theMaxAccepted;
        }
      }
    }

    for (const auto myPolicy : aConfig.thePolicies) {
      const auto myMetrics = replicate(myTopology,
                                       mySpec,
                                       myPolicy,
                                       myK,
                                       aConfig.theNumRuns,
                                       mySpec.theSeed,
                                       myRunOptions,
                                       aOptions.theNumThreads);

      // statistics are computed on the values as printed in runs.csv
      std::vector<std::vector<double>> myColumns(metricColumns().size());
      for (std::size_t i = 0; i < myMetrics.size(); i++) {
        const auto& m = myMetrics[i];
        ret.push_back(RunRecord{myValueString,
                                myPolicy,
                                i,
                                mySpec.theSeed + i,
                                m,
                                myOptima[i]});
        const std::vector<double> myRow({static_cast<double>(m.theOffered),
                                         static_cast<double>(m.theAccepted),
                                         m.theAcceptanceRatio,
                                         m.theCarriedKeyRate,
                                         m.theCpuUtilization,
                                         m.theSkrUtilization,
                                         m.theMeanPathHops});
        for (std::size_t c = 0; c < myRow.size(); c++) {
          myColumns[c].push_back(std::stod(formatValue(myRow[c])));
        }
        if (aOptions.theVerbose) {
          aLog << toString(aConfig.theSweepParam) << "=" << myValueString
               << " " << toString(myPolicy) << " run " << i << ": "
               << m.toString() << '\n';
        }
      }

      mySummary << toString(aConfig.theSweepParam) << ',' << myValueString
                << ',' << toString(myPolicy) << ',' << aConfig.theNumRuns;
      std::vector<std::pair<double, double>> myStats;
      for (const auto& myColumn : myColumns) {
        double mySum = 0;
        for (const auto x : myColumn) {
          mySum += x;
        }
        const auto myMean = mySum / myColumn.size();
        double     mySq   = 0;
        for (const auto x : myColumn) {
          mySq += (x - myMean) * (x - myMean);
        }
        const auto myStd =
            myColumn.size() > 1 ? std::sqrt(mySq / (myColumn.size() - 1)) : 0.0;
        myStats.emplace_back(myMean, myStd);
        mySummary << ',' << formatExact(myMean) << ',' << formatExact(myStd);
      }
      mySummary << '\n';

      aOut << toString(aConfig.theSweepParam);
      if (myValue) {
        aOut << '=' << myValueString;
      }
      aOut << ' ' << toString(myPolicy) << ": acceptance "
           << formatValue(myStats[2].first) << " +- "
           << formatValue(myStats[2].second) << ", cpu util "
           << formatValue(myStats[4].first) << ", skr util "
           << formatValue(myStats[5].first) << ", hops "
           << formatValue(myStats[6].first) << " (" << aConfig.theNumRuns
           << " runs)\n";
    }
  }

  // write everything at the end
  for (std::size_t c = 0; c < runsColumns().size(); c++) {
    myRunsFile << (c > 0 ? "," : "") << runsColumns()[c];
  }
  if (aOptions.theOracle) {
    myRunsFile << ",offline_optimum";
  }
  myRunsFile << '\n';
  for (const auto& myRecord : ret) {
    const auto& m = myRecord.theMetrics;
    myRunsFile << toString(aConfig.theSweepParam) << ','
               << myRecord.theSweepValue << ',' << toString(myRecord.thePolicy)
               << ',' << myRecord.theRunIndex << ',' << myRecord.theSeed << ','
               << m.theOffered << ',' << m.theAccepted << ','
               << formatValue(m.theAcceptanceRatio) << ','
               << formatValue(m.theCarriedKeyRate) << ','
               << formatValue(m.theCpuUtilization) << ','
               << formatValue(m.theSkrUtilization) << ','
               << formatValue(m.theMeanPathHops);
    if (aOptions.theOracle) {
      myRunsFile << ',';
      if (myRecord.theOfflineOptimum) {
        myRunsFile << *myRecord.theOfflineOptimum;
      }
    }
    myRunsFile << '\n';
  }
  mySummaryFile << mySummary.str();

  myRunsFile.close();
  mySummaryFile.close();
  if (not myRunsFile or not mySummaryFile) {
    throw std::runtime_error("Error writing results to " + myOutDir.string());
  }
  return ret;
}

} // namespace qkdedge
} // namespace uiiit
