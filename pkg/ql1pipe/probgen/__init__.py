from .families import (GENERATORS, GeneratedInstance, gen_elastic_net,
                       gen_sigrec, gen_strict_comp, generate)
from .manifest import (gen_suite, manifest_from_paths, read_manifest,
                       write_manifest)
from .rng import Rng
