/*
 * This file is part of vogrid, a desk-scale virtual-organization grid.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>

namespace fixtures {

/// Small VO used across the unit tests: three users, two sites, three SEs,
/// the classic simulation software stack and a couple of policies.
inline std::string small_vo_text() {
  return R"(# test virtual organization
[groups]
alice
hep
prod
admingrp

[roles]
admin
production

[users]
root groups=admingrp roles=admin
alice groups=alice,hep
bob groups=hep
prodmgr groups=prod roles=production

[sites]
CERN partition=tier1
FZK partition=tier1
Bari partition=tier2 private=true

[storage_elements]
SE_CERN site=CERN capacity=1000000000000
SE_FZK site=FZK capacity=500000000000
SE_Bari site=Bari capacity=200000000000

[computing_elements]
CE_CERN site=CERN platform=i686-linux max_slots=4 close_se=SE_CERN
CE_FZK site=FZK platform=i686-linux max_slots=2 close_se=SE_FZK
CE_Bari site=Bari platform=i686-linux max_slots=2 close_se=SE_Bari

[packages]
ROOT::3.02.07
ROOT::3.05.01
GEANT::3.21 depends=ROOT::any
AliRoot::3.05 depends=ROOT::any,GEANT::3.21 setup="export ALIROOT_DIR"

[commands]
aliroot-sim packages=AliRoot::3.05 validation=outputs_nonzero duration=600 produces=out.root:2000000000,sim.log:4096
quick packages=ROOT::any duration=10 produces=result.dat:1024 validation=outputs_nonzero
flaky duration=10 produces=out.dat:128 fail_rate=0.5
noval duration=5 produces=trace.log:64

[grid_partitions]
tier1 sites=CERN,FZK
tier2 sites=Bari

[policies]
prodboost kind=role_priority role=production priority=10
alicecap kind=user_cap user=alice max_active=2
)";
}

}  // namespace fixtures
