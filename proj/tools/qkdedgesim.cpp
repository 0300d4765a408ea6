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

#include "qkdedge/experiment.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

int main(int argc, char* argv[]) {
  using namespace uiiit::qkdedge;

  CLI::App myApp(
      "Online admission control of edge applications over a QKD network");

  std::string   myConfigPath;
  std::string   myOutput;
  std::uint64_t mySeed = 0;
  std::size_t   myThreads = 0;
  ExperimentOptions myOptions;

  myApp.add_option("--config", myConfigPath, "Experiment configuration (JSON)")
      ->required();
  auto myOutputOpt =
      myApp.add_option("--output", myOutput, "Output directory (overrides config)");
  auto mySeedOpt =
      myApp.add_option("--seed", mySeed, "Workload seed (overrides config)");
  myApp.add_flag("--oracle",
                 myOptions.theOracle,
                 "Add the offline optimum for small enough instances");
  myApp.add_flag("--verbose", myOptions.theVerbose, "Print every run");
  myApp.add_option("--threads", myThreads, "Worker threads, 0 means all cores");

  CLI11_PARSE(myApp, argc, argv);
  myOptions.theNumThreads = myThreads;

  try {
    auto myConfig = ExperimentConfig::fromFile(myConfigPath);
    if (*myOutputOpt) {
      myConfig.theOutput = myOutput;
    }
    if (*mySeedOpt) {
      myConfig.theWorkload.theSeed = mySeed;
    }
    if (myOptions.theVerbose) {
      std::cerr << "topology: " << myConfig.topology().toString() << '\n';
    }
    runExperiment(myConfig, myOptions, std::cout, std::cerr);
  } catch (const std::exception& aErr) {
    std::cerr << "error: " << aErr.what() << std::endl;
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
