"""
Command handler for `gsketch sketch`: embeds point sets into a binary sketch file.
"""
import logging

from commands.command_support import CommandResult, build_plan, load_pointsets, resolve_seed
from modules.errors import InputShapeError
from modules.parsers.sketch_file import SketchFileHeader, write_sketch_file
from modules.sketching.compress import JlProjector
from modules.sketching.seeding import child_seed
from modules.sketching.sketchers import embed_set, sketch_from_plan

logger = logging.getLogger(__name__)


def execute(args, config):
    sets = load_pointsets(args.input, args)
    dims = {P.d for P in sets}
    if len(dims) != 1:
        raise InputShapeError(f"point sets have inconsistent dimensions {sorted(dims)}")
    planned = build_plan(args, config, sets[0].d, sets)
    seed = resolve_seed(args, config)

    G = sketch_from_plan(planned, seed)
    projector = JlProjector(G.output_dim, planned.jl_dim, child_seed(seed, "projector")) if planned.jl_dim else None
    embeddings = []
    for P in sets:
        embedding = embed_set(G, P)
        embeddings.append(projector.project_embedding(embedding) if projector else embedding)

    header = SketchFileHeader.for_sketch(G, projector)
    write_sketch_file(args.out, header, embeddings)
    return CommandResult("\n".join([
        f"sets={len(embeddings)}",
        f"width={header.width}",
        f"fingerprint={header.fingerprint.hex()}",
        f"out={args.out}",
    ]))
