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

#include "qkdedge/topology.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uiiit {
namespace qkdedge {

/**
 * Lattice of aRows x aCols nodes numbered in row-major order, all links with
 * rate aSkr, an edge node with capacity aCpu every aEdgeEvery nodes starting
 * from node 0.
 */
inline QkdTopology makeGrid(const std::size_t aRows,
                            const std::size_t aCols,
                            const double      aSkr,
                            const std::size_t aEdgeEvery,
                            const double      aCpu) {
  if (aRows == 0 or aCols == 0 or aEdgeEvery == 0) {
    throw std::invalid_argument(
        "Invalid GRID: rows, cols, and edge_every must be positive");
  }
  const auto myNode = [aCols](std::size_t r, std::size_t c) {
    return static_cast<NodeId>(r * aCols + c);
  };
  std::vector<QkdLink> myLinks;
  for (std::size_t r = 0; r < aRows; r++) {
    for (std::size_t c = 0; c < aCols; c++) {
      if (c + 1 < aCols) {
        myLinks.push_back({myNode(r, c), myNode(r, c + 1), aSkr});
      }
      if (r + 1 < aRows) {
        myLinks.push_back({myNode(r, c), myNode(r + 1, c), aSkr});
      }
    }
  }
  std::vector<EdgeNode> myEdges;
  for (std::size_t n = 0; n < aRows * aCols; n += aEdgeEvery) {
    myEdges.push_back({static_cast<NodeId>(n), aCpu});
  }
  return QkdTopology(aRows * aCols, std::move(myLinks), std::move(myEdges));
}

//! Cycle of aNumNodes nodes with aNumEdges edge nodes evenly spaced from 0.
inline QkdTopology makeRing(const std::size_t aNumNodes,
                            const double      aSkr,
                            const std::size_t aNumEdges,
                            const double      aCpu) {
  if (aNumNodes == 0 or aNumEdges == 0 or aNumEdges > aNumNodes) {
    throw std::invalid_argument(
        "Invalid RING: need 1 <= n_edges <= n nodes");
  }
  std::vector<QkdLink> myLinks;
  if (aNumNodes == 2) {
    myLinks.push_back({0, 1, aSkr});
  } else if (aNumNodes > 2) {
    for (std::size_t i = 0; i < aNumNodes; i++) {
      myLinks.push_back({static_cast<NodeId>(i),
                         static_cast<NodeId>((i + 1) % aNumNodes),
                         aSkr});
    }
  }
  std::vector<EdgeNode> myEdges;
  for (std::size_t i = 0; i < aNumEdges; i++) {
    myEdges.push_back({static_cast<NodeId>(i * aNumNodes / aNumEdges), aCpu});
  }
  return QkdTopology(aNumNodes, std::move(myLinks), std::move(myEdges));
}

/**
 * Topology from a JSON object:
 *
 * {"nodes":[0,1,...], "links":[{"a":0,"b":1,"skr":10},...],
 *  "edges":[{"node":0,"cpu":4},...]}
 *
 * The node ids must be exactly 0..N-1, in any order.
 *
 * \throw std::invalid_argument naming the offending field.
 */
inline QkdTopology topologyFromJson(const nlohmann::json& aJson) {
  const auto fail = [](const std::string& aWhat) {
    throw std::invalid_argument("Invalid topology: " + aWhat);
  };
  if (not aJson.is_object()) {
    fail("not a JSON object");
  }
  for (const auto& myItem : aJson.items()) {
    if (myItem.key() != "nodes" and myItem.key() != "links" and
        myItem.key() != "edges") {
      fail("unknown field '" + myItem.key() + "'");
    }
  }
  for (const auto myField : {"nodes", "links", "edges"}) {
    if (not aJson.contains(myField) or not aJson[myField].is_array()) {
      fail(std::string("missing array '") + myField + "'");
    }
  }

  const auto myNodeId = [&fail](const nlohmann::json& aValue,
                                const std::string&    aWhere) {
    if (not aValue.is_number_integer() or aValue.get<long long>() < 0) {
      fail(aWhere + ": not a non-negative integer");
    }
    return aValue.get<long long>();
  };
  const auto myNumber = [&fail](const nlohmann::json& aObject,
                                const std::string&    aKey,
                                const std::string&    aWhere) {
    if (not aObject.contains(aKey) or not aObject[aKey].is_number()) {
      fail(aWhere + "." + aKey + ": missing or not a number");
    }
    return aObject[aKey].get<double>();
  };

  std::set<long long> myNodes;
  const auto&         myJsonNodes = aJson["nodes"];
  for (std::size_t i = 0; i < myJsonNodes.size(); i++) {
    const auto myId =
        myNodeId(myJsonNodes[i], "nodes[" + std::to_string(i) + "]");
    if (not myNodes.insert(myId).second) {
      fail("nodes[" + std::to_string(i) + "]: duplicate node " +
           std::to_string(myId));
    }
  }
  if (myNodes.empty()) {
    fail("no nodes");
  }
  if (*myNodes.rbegin() != static_cast<long long>(myNodes.size()) - 1) {
    fail("node ids must be 0.." + std::to_string(myNodes.size() - 1));
  }
  const auto myKnown = [&](const long long aId, const std::string& aWhere) {
    if (myNodes.count(aId) == 0) {
      fail(aWhere + ": unknown node " + std::to_string(aId));
    }
    return static_cast<NodeId>(aId);
  };

  std::vector<QkdLink> myLinks;
  const auto&          myJsonLinks = aJson["links"];
  for (std::size_t i = 0; i < myJsonLinks.size(); i++) {
    const auto myWhere = "links[" + std::to_string(i) + "]";
    const auto& myLink = myJsonLinks[i];
    if (not myLink.is_object() or not myLink.contains("a") or
        not myLink.contains("b")) {
      fail(myWhere + ": expected {\"a\", \"b\", \"skr\"}");
    }
    myLinks.push_back(
        {myKnown(myNodeId(myLink["a"], myWhere + ".a"), myWhere + ".a"),
         myKnown(myNodeId(myLink["b"], myWhere + ".b"), myWhere + ".b"),
         myNumber(myLink, "skr", myWhere)});
  }

  std::vector<EdgeNode> myEdges;
  const auto&           myJsonEdges = aJson["edges"];
  for (std::size_t i = 0; i < myJsonEdges.size(); i++) {
    const auto  myWhere = "edges[" + std::to_string(i) + "]";
    const auto& myEdge  = myJsonEdges[i];
    if (not myEdge.is_object() or not myEdge.contains("node")) {
      fail(myWhere + ": expected {\"node\", \"cpu\"}");
    }
    myEdges.push_back(
        {myKnown(myNodeId(myEdge["node"], myWhere + ".node"),
                 myWhere + ".node"),
         myNumber(myEdge, "cpu", myWhere)});
  }

  return QkdTopology(myNodes.size(), std::move(myLinks), std::move(myEdges));
}

inline nlohmann::json toJson(const QkdTopology& aTopology) {
  nlohmann::json ret;
  ret["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < aTopology.numNodes(); i++) {
    ret["nodes"].push_back(i);
  }
  ret["links"] = nlohmann::json::array();
  for (const auto& myLink : aTopology.links()) {
    ret["links"].push_back(
        {{"a", myLink.theA}, {"b", myLink.theB}, {"skr", myLink.theSkr}});
  }
  ret["edges"] = nlohmann::json::array();
  for (const auto& myEdge : aTopology.edges()) {
    ret["edges"].push_back(
        {{"node", myEdge.theLocation}, {"cpu", myEdge.theCpu}});
  }
  return ret;
}

//! \throw std::invalid_argument if unreadable or malformed.
inline QkdTopology topologyFromFile(const std::string& aPath) {
  std::ifstream myFile(aPath);
  if (not myFile) {
    throw std::invalid_argument("Cannot read topology file: " + aPath);
  }
  nlohmann::json myJson;
  try {
    myJson = nlohmann::json::parse(myFile);
  } catch (const nlohmann::json::parse_error& aErr) {
    throw std::invalid_argument("Malformed topology file " + aPath + ": " +
                                aErr.what());
  }
  try {
    return topologyFromJson(myJson);
  } catch (const std::invalid_argument& aErr) {
    throw std::invalid_argument(aPath + ": " + aErr.what());
  }
}

/**
 * Build a topology from a textual spec, one of:
 *
 * - GRID(rows, cols, skr, edge_every, cpu)
 * - RING(n, skr, n_edges, cpu)
 * - FILE(path), or a bare path to a JSON topology file
 */
inline QkdTopology buildTopology(const std::string& aSpec) {
  static const std::regex myRegex(R"(^\s*([A-Za-z]+)\s*\((.*)\)\s*$)");
  std::smatch             myMatch;
  if (not std::regex_match(aSpec, myMatch, myRegex)) {
    return topologyFromFile(aSpec);
  }
  std::string myName = myMatch[1];
  std::transform(myName.begin(), myName.end(), myName.begin(), [](char c) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  });
  const std::string myArgs = myMatch[2];
  if (myName == "FILE") {
    const auto myBegin = myArgs.find_first_not_of(" \t");
    const auto myEnd   = myArgs.find_last_not_of(" \t");
    if (myBegin == std::string::npos) {
      throw std::invalid_argument("Invalid topology spec: " + aSpec);
    }
    return topologyFromFile(myArgs.substr(myBegin, myEnd - myBegin + 1));
  }

  std::vector<double> myValues;
  std::stringstream   myStream(myArgs);
  std::string         myToken;
  while (std::getline(myStream, myToken, ',')) {
    std::size_t myPos = 0;
    double      myValue;
    try {
      myValue = std::stod(myToken, &myPos);
    } catch (const std::exception&) {
      throw std::invalid_argument("Invalid number '" + myToken +
                                  "' in topology spec: " + aSpec);
    }
    if (myToken.find_first_not_of(" \t", myPos) != std::string::npos) {
      throw std::invalid_argument("Invalid number '" + myToken +
                                  "' in topology spec: " + aSpec);
    }
    myValues.push_back(myValue);
  }
  const auto myCount = [&](const double aValue) {
    if (aValue < 0 or aValue != std::floor(aValue)) {
      throw std::invalid_argument("Invalid count in topology spec: " + aSpec);
    }
    return static_cast<std::size_t>(aValue);
  };

  if (myName == "GRID" and myValues.size() == 5) {
    return makeGrid(myCount(myValues[0]),
                    myCount(myValues[1]),
                    myValues[2],
                    myCount(myValues[3]),
                    myValues[4]);
  } else if (myName == "RING" and myValues.size() == 4) {
    return makeRing(
        myCount(myValues[0]), myValues[1], myCount(myValues[2]), myValues[3]);
  }
  throw std::invalid_argument("Invalid topology spec: " + aSpec);
}

} // namespace qkdedge
} // namespace uiiit
