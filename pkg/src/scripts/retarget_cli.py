"""Command-line entry point for the retargeting pipeline.

Usage:
    python -m src.scripts.retarget_cli gen-data --desk-scale --out output/data
    python -m src.scripts.retarget_cli train --desk-scale --source output/data --out output/train
    python -m src.scripts.retarget_cli retarget --checkpoint output/train --source a.clip.txt --target b.clip.txt --out c.clip.txt
    python -m src.scripts.retarget_cli eval-idscore --checkpoint output/train --source output/data --out idscore.csv
    python -m src.scripts.retarget_cli render --source c.clip.txt --out frames/

Exit status is 0 on success, 1 when a pipeline stage fails and 2 for usage
errors or missing inputs.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.config.logging_config import log_stage, setup_logging
from src.config.run_config import RunConfig
from src.config.runtime_config import runtime_config
from src.data_processing.skeleton.keypoint_cleaner import preprocess_directory
from src.data_processing.skeleton.keypoint_loader import (
    CLIP_SUFFIX,
    KeypointFormat,
    index_digest,
    load_clip,
    load_manifest,
    save_clip,
    write_manifest,
)
from src.data_processing.skeleton.synthetic_generator import build_synthetic_dataset
from src.data_processing.skeleton.triplet_sampler import split_identities
from src.errors import RetargetError
from src.evaluation.embedding_analyzer import export_embeddings
from src.evaluation.idscore.idscore_analyzer import run_idscore_protocol, write_report
from src.training.checkpoint import LATEST_NAME
from src.training.metrics_logger import METRICS_NAME
from src.training.trainer import fit, load_model, retarget
from src.visualization.skeleton_view import render_clip
from src.visualization.training_view import write_loss_curves

logger = logging.getLogger(__name__)

NEW_SUBJECT_DIR = 'new_subject'
LOSS_CURVES_NAME = 'loss_curves.html'


class UsageError(Exception):
    """Raised for flag combinations the parser cannot catch."""
    pass


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """RunConfig from --config or --desk-scale, with command-line overrides applied."""
    if getattr(args, 'config', None):
        config = RunConfig.load(Path(args.config))
    elif getattr(args, 'desk_scale', False):
        config = RunConfig.desk_scale()
    else:
        config = RunConfig()

    if getattr(args, 'seed', None) is not None:
        config = config.with_seed(args.seed)

    data = config.model_dump()
    if getattr(args, 'gan_form', None):
        data['train']['gan_form'] = args.gan_form
    if getattr(args, 'epochs', None) is not None:
        data['train']['max_epochs'] = args.epochs
    if getattr(args, 'embedder', None):
        data['eval']['embedder'] = args.embedder
    return RunConfig.model_validate(data)


def _require(value: Optional[str], flag: str, command: str) -> str:
    if not value:
        raise UsageError(f"{command} requires {flag}")
    return value


def output_path(config: RunConfig, *parts: str) -> Path:
    """Path under the config's output_dir, else under RETARGET_OUTPUT_DIR."""
    if config.output_dir:
        return Path(config.output_dir).joinpath(*parts)
    return runtime_config.get_output_path(*parts)


def data_path(config: RunConfig) -> Path:
    return Path(config.data_dir) if config.data_dir else output_path(config, 'data')


def _new_subject_clip(data_dir: Path, target: Optional[str]):
    if target:
        return load_clip(target)
    candidates = sorted((data_dir / NEW_SUBJECT_DIR).glob(f"*{CLIP_SUFFIX}"))
    if not candidates:
        raise FileNotFoundError(f"No new-subject clip given and none found in {data_dir / NEW_SUBJECT_DIR}")
    return load_clip(candidates[0])


@log_stage('gen-data')
def cmd_gen_data(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    out_dir = Path(args.out or data_path(config))
    index, new_subject = build_synthetic_dataset(config.dataset)
    write_manifest(index, out_dir)
    for clip in new_subject:
        save_clip(clip, out_dir / NEW_SUBJECT_DIR / f"{clip.clip_id}{CLIP_SUFFIX}")
    print(f"Wrote {len(index)} clips and {len(new_subject)} new-subject clips to {out_dir}")
    return 0


@log_stage('preprocess')
def cmd_preprocess(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    source = Path(_require(args.source, '--source', 'preprocess'))
    if not source.exists():
        raise FileNotFoundError(f"Keypoint input not found: {source}")
    out_dir = Path(args.out or data_path(config))

    index = preprocess_directory(source, T=config.dataset.clip_length, fps=config.dataset.fps, format=args.format)
    n_test = min(config.dataset.n_test_ids, max(0, len(index.id_labels) - 2))
    index = split_identities(index, n_test=n_test, seed=config.dataset.seed)
    write_manifest(index, out_dir)
    print(f"Preprocessed {len(index)} clips of {len(index.id_labels)} identities into {out_dir}")
    return 0


@log_stage('train')
def cmd_train(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    data_dir = Path(args.source or data_path(config))
    out_dir = Path(args.out or output_path(config, 'train'))
    out_dir.mkdir(parents=True, exist_ok=True)

    dataset = load_manifest(data_dir)
    config.save(out_dir / 'run_config.json')
    checkpoint = fit(dataset, config, out_dir, resume_from=args.checkpoint, manifest_digest=index_digest(dataset))
    write_loss_curves(out_dir / METRICS_NAME, out_dir / LOSS_CURVES_NAME)
    final = checkpoint.history[-1] if checkpoint.history else {}
    print(f"Trained to epoch {checkpoint.epoch}; checkpoint at {out_dir / LATEST_NAME}; final {final}")
    return 0


@log_stage('retarget')
def cmd_retarget(args: argparse.Namespace) -> int:
    checkpoint = _require(args.checkpoint, '--checkpoint', 'retarget')
    source = load_clip(_require(args.source, '--source', 'retarget'))
    target = load_clip(_require(args.target, '--target', 'retarget'))
    out_path = Path(_require(args.out, '--out', 'retarget'))

    clip = retarget(source, target, checkpoint)
    save_clip(clip, out_path)
    print(f"Wrote {clip.clip_id} to {out_path}")
    return 0


@log_stage('eval-idscore')
def cmd_eval_idscore(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    model = load_model(_require(args.checkpoint, '--checkpoint', 'eval-idscore'))
    data_dir = Path(args.source or data_path(config))
    dataset = load_manifest(data_dir)
    new_subject = _new_subject_clip(data_dir, args.target)

    report = run_idscore_protocol(model, dataset, new_subject, config.eval)
    out_path = Path(args.out or output_path(config, 'idscore.csv'))
    write_report(report, out_path)
    print(report.model_dump_json(indent=2))
    return 0


@log_stage('render')
def cmd_render(args: argparse.Namespace) -> int:
    clip = load_clip(_require(args.source, '--source', 'render'))
    out_dir = Path(_require(args.out, '--out', 'render'))
    size = (args.size, args.size)
    paths = render_clip(clip, out_dir, prefix=clip.clip_id or 'frame', size=size)
    print(f"Rendered {len(paths)} frames to {out_dir}")
    return 0


@log_stage('export-embeddings')
def cmd_export_embeddings(args: argparse.Namespace) -> int:
    config = load_run_config(args)
    model = load_model(_require(args.checkpoint, '--checkpoint', 'export-embeddings'))
    dataset = load_manifest(Path(args.source or data_path(config)))
    out_path = Path(args.out or output_path(config, 'embeddings.csv'))
    summary = export_embeddings(model, dataset, out_path)
    print(f"Wrote embeddings to {out_path}; 1-NN accuracy {summary}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='retarget', description='Identity-preserving skeleton motion retargeting')
    subparsers = parser.add_subparsers(dest='command', required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument('--config', help='Run configuration JSON file')
        sub.add_argument('--desk-scale', action='store_true', help='Use the reduced CPU configuration')
        sub.add_argument('--seed', type=int, help='Override every seed in the configuration')
        sub.add_argument('--out', help='Output file or directory')
        sub.set_defaults(func=func)
        return sub

    add('gen-data', cmd_gen_data, 'Generate the synthetic identity x content dataset')

    sub = add('preprocess', cmd_preprocess, 'Clean, trim and split raw keypoint sequences')
    sub.add_argument('--source', help='Directory of subjects or clip container files')
    sub.add_argument('--format', choices=[f.value for f in KeypointFormat],
                     default=KeypointFormat.OPENPOSE_JSON_DIR.value, help='Layout of the raw input')

    sub = add('train', cmd_train, 'Train the retargeting model')
    sub.add_argument('--source', help='Dataset directory holding manifest.csv')
    sub.add_argument('--checkpoint', help='Checkpoint to resume from')
    sub.add_argument('--epochs', type=int, help='Override train.max_epochs')
    sub.add_argument('--gan-form', choices=['lsgan', 'log'], help='Adversarial objective')

    sub = add('retarget', cmd_retarget, 'Perform the source motion with the target identity')
    sub.add_argument('--checkpoint', help='Checkpoint file or training directory')
    sub.add_argument('--source', help='Clip providing the motion content')
    sub.add_argument('--target', help='Clip providing the identity')

    sub = add('eval-idscore', cmd_eval_idscore, 'Run the IDScore protocol')
    sub.add_argument('--checkpoint', help='Checkpoint file or training directory')
    sub.add_argument('--source', help='Dataset directory holding manifest.csv')
    sub.add_argument('--target', help='New-subject clip (defaults to the first in new_subject/)')
    sub.add_argument('--embedder', help="'baseline' or 'external:<path>'")

    sub = add('render', cmd_render, 'Draw a clip as stick-figure frames')
    sub.add_argument('--source', help='Clip container file')
    sub.add_argument('--size', type=int, default=512, help='Frame width and height in pixels')

    sub = add('export-embeddings', cmd_export_embeddings, 'Export latent embeddings and 1-NN accuracies')
    sub.add_argument('--checkpoint', help='Checkpoint file or training directory')
    sub.add_argument('--source', help='Dataset directory holding manifest.csv')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging('src')
    parser = build_parser()
    args = parser.parse_args(argv)
    stage = args.command
    try:
        return args.func(args)
    except (UsageError, FileNotFoundError, ValidationError) as e:
        print(f"retarget {stage}: {e}", file=sys.stderr)
        return 2
    except RetargetError as e:
        print(f"retarget {stage} failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
