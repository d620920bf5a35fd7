#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行入口：bound / measure / naqi / scan / threshold / exclusion / selftest / settings
"""

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .errors import OptimizerError, QimagError
from .models.complementarity import L1_BOUND, REFERENCE_RELATIVE_ENTROPY_BOUND, bound_constant
from .models.frames import mub_triple
from .models.imaginarity import OrthonormalBasis, imag_measure
from .models.naqi import witness
from .models.qmat import BlochVector, bloch_to_density
from .models.scenarios import (BellMixture, Werner, alpha_beta_grid, build_state, exclusion_scan,
                               family_template, find_naqi_threshold, scan_family, theta_grid)
from .utils import state_io
from .utils.i18n import get_text, set_language
from .utils.log_manager import init_logging
from .utils.optimize import OptimizerConfig
from .utils.settings_manager import load_settings, resolve_settings_path, save_settings
from .utils.worker_pool import WorkerPool, resolve_worker_count

logger = logging.getLogger(__name__)

MEASURES = ('l1', 'r')
FAMILY_CHOICES = ('bell', 'werner')
BOUND_DIGITS = 10
SELFTEST_TOL = 1e-6


def _sig(x, digits=BOUND_DIGITS):
    return float(f'{float(x):.{digits}g}')


def _common_parent():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--settings', help=get_text('help_settings'))
    parent.add_argument('--log-file', help=get_text('help_log_file'))
    parent.add_argument('--verbose', action='store_true', help=get_text('help_verbose'))
    parent.add_argument('--lang', choices=('zh', 'en'), help=get_text('help_lang'))
    return parent


def _optimizer_parent(workers=True):
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--grid', type=int, help=get_text('help_grid'))
    parent.add_argument('--refine-iters', type=int, help=get_text('help_refine_iters'))
    parent.add_argument('--refine-tol', type=float, help=get_text('help_refine_tol'))
    parent.add_argument('--starts', type=int, help=get_text('help_starts'))
    parent.add_argument('--inner-starts', type=int, help=get_text('help_inner_starts'))
    parent.add_argument('--seed', type=int, help=get_text('help_seed'))
    if workers:
        parent.add_argument('--workers', type=int, help=get_text('help_workers'))
    parent.add_argument('--restricted-frames', action='store_true', help=get_text('help_restricted_frames'))
    parent.add_argument('--numeric-inner', action='store_true', help=get_text('help_numeric_inner'))
    parent.add_argument('--verdict-margin', type=float, help=get_text('help_verdict_margin'))
    return parent


def _output_parent(default_format):
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--output', '-o', help=get_text('help_output'))
    parent.add_argument('--format', choices=('csv', 'json'), default=default_format,
                        help=get_text('help_format'))
    return parent


def build_parser():
    common = _common_parent()
    optimizer = _optimizer_parent()
    parser = argparse.ArgumentParser(prog='qimag', description=get_text('cli_description'),
                                     allow_abbrev=False)
    parser.add_argument('--version', action='version', version=f'qimag {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    def add(name, parents):
        return sub.add_parser(name, parents=parents, allow_abbrev=False)

    p = add('bound', [common, _output_parent('json')])
    p.add_argument('--measure', choices=MEASURES, help=get_text('help_measure'))

    p = add('measure', [common, _output_parent('json')])
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--bloch', type=float, nargs=3, metavar=('NX', 'NY', 'NZ'), help=get_text('help_bloch'))
    source.add_argument('--state-json', help=get_text('help_state_json'))
    frame = p.add_mutually_exclusive_group()
    frame.add_argument('--basis', choices=('x', 'y', 'z'), help=get_text('help_basis'))
    frame.add_argument('--mub', type=float, nargs=2, metavar=('THETA1', 'PHI1'), help=get_text('help_mub'))
    p.add_argument('--chi', type=float, default=0.0, help=get_text('help_chi'))
    p.add_argument('--measure', choices=MEASURES, help=get_text('help_measure'))
    p.add_argument('--degrees', action='store_true', help=get_text('help_degrees'))

    p = add('naqi', [common, optimizer, _output_parent('json')])
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--family', choices=FAMILY_CHOICES, help=get_text('help_family'))
    source.add_argument('--state-json', help=get_text('help_state_json'))
    p.add_argument('--p', type=float, help=get_text('help_p'))
    p.add_argument('--measure', choices=MEASURES, default='l1', help=get_text('help_measure'))

    p = add('scan', [common, optimizer, _output_parent('csv')])
    p.add_argument('--family', choices=FAMILY_CHOICES, required=True, help=get_text('help_family'))
    grid = p.add_mutually_exclusive_group()
    grid.add_argument('--values', type=float, nargs='+', help=get_text('help_values'))
    grid.add_argument('--range', type=float, nargs=3, metavar=('START', 'STOP', 'COUNT'),
                      help=get_text('help_range'))
    p.add_argument('--measure', choices=MEASURES, default='l1', help=get_text('help_measure'))

    p = add('threshold', [common, optimizer, _output_parent('json')])
    p.add_argument('--family', choices=FAMILY_CHOICES, required=True, help=get_text('help_family'))
    p.add_argument('--measure', choices=MEASURES, default='l1', help=get_text('help_measure'))
    p.add_argument('--bracket', type=float, nargs=2, default=(0.5, 1.0), metavar=('LO', 'HI'),
                   help=get_text('help_bracket'))
    p.add_argument('--tol', type=float, default=1e-5, help=get_text('help_tol'))

    p = add('exclusion', [common, optimizer, _output_parent('csv')])
    p.add_argument('--variant', choices=('alpha-beta', 'theta'), default='theta', help=get_text('help_variant'))
    p.add_argument('--n-alpha', type=int, default=40, help=get_text('help_n_alpha'))
    p.add_argument('--n-beta', type=int, default=40, help=get_text('help_n_beta'))
    p.add_argument('--n-theta', type=int, default=100, help=get_text('help_n_theta'))
    p.add_argument('--theta-range', type=float, nargs=2, metavar=('LO', 'HI'), help=get_text('help_theta_range'))
    p.add_argument('--measure', choices=MEASURES, default='l1', help=get_text('help_measure'))
    p.add_argument('--reverse-roles', action='store_true', help=get_text('help_reverse_roles'))
    p.add_argument('--degrees', action='store_true', help=get_text('help_degrees'))

    p = add('selftest', [common, _optimizer_parent(workers=False)])
    p.add_argument('--debug-verdict-margin', type=float, help=get_text('help_debug_margin'))

    p = add('settings', [common])
    p.add_argument('--write', action='store_true', help=get_text('help_write_settings'))
    return parser


def _pre_parse(argv):
    """先取出 --lang 与 --settings，帮助文本需要在建解析器前确定语言"""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--lang')
    pre.add_argument('--settings')
    known, _ = pre.parse_known_args(argv)
    return known


def optimizer_config(args, settings):
    config = OptimizerConfig.from_settings(settings.get('optimizer'))
    config = config.replace(
        grid_points_per_dim=getattr(args, 'grid', None),
        refine_iterations=getattr(args, 'refine_iters', None),
        refine_tolerance=getattr(args, 'refine_tol', None),
        multistart_count=getattr(args, 'starts', None),
        inner_multistart_count=getattr(args, 'inner_starts', None),
        seed=getattr(args, 'seed', None),
    )
    if getattr(args, 'restricted_frames', False):
        config = config.replace(full_frame_orbit=False)
    if getattr(args, 'numeric_inner', False):
        config = config.replace(analytic_l1_inner=False)
    return config


def _verdict_margin(args, settings):
    margin = getattr(args, 'verdict_margin', None)
    return float(settings['verdict_margin'] if margin is None else margin)


def _angle(value, degrees):
    return float(np.deg2rad(value)) if degrees else float(value)


def _emit(text, args):
    state_io.write_text(text, path=getattr(args, 'output', None))
    if getattr(args, 'output', None):
        print(f'{get_text("written_to")}: {args.output}', file=sys.stderr)


def _two_qubit_state(args):
    if args.state_json:
        if args.p is not None:
            raise QimagError('--p 只能与 --family 一起使用', field='p')
        return args.state_json, state_io.read_state_json(args.state_json)
    if args.p is None:
        raise QimagError('使用 --family 时必须给出 --p', field='p')
    return f'{args.family}(p={args.p})', build_state(family_template(args.family)(args.p))


def cmd_bound(args, settings):
    measures = [args.measure] if args.measure else list(MEASURES)
    payload = {}
    for tag in measures:
        constant = bound_constant(tag)
        payload[tag] = {'value': _sig(constant.value),
                        'maximizer': [_sig(x) for x in constant.maximizer.as_list()]}
    if args.measure:
        payload = payload[args.measure]
    _emit(state_io.json_text(payload), args)
    return 0


def cmd_settings(args, settings):
    """输出当前生效的设置；--write 时把它写回设置文件(缺失的键以默认值补全)"""
    if args.write:
        save_settings(settings, args.settings)
        logger.info(f'设置已写入 {resolve_settings_path(args.settings)}')
    _emit(state_io.json_text(settings), args)
    return 0


def cmd_measure(args, settings):
    if args.state_json:
        rho = state_io.read_state_json(args.state_json)
        source = args.state_json
    else:
        rho = bloch_to_density(BlochVector.from_array(args.bloch))
        source = 'bloch'
    measures = [args.measure] if args.measure else list(MEASURES)
    payload = {'state': source}
    if args.mub:
        theta1, phi1 = (_angle(x, args.degrees) for x in args.mub)
        triple = mub_triple(theta1, phi1, chi=_angle(args.chi, args.degrees))
        payload['mub_angles'] = [theta1, phi1]
        payload['frame_phase'] = triple.chi
        for tag in measures:
            terms = [imag_measure(tag, rho, basis) for basis in triple.bases]
            payload[tag] = {'terms': terms, 'sum': float(sum(terms)), 'bound': bound_constant(tag).value}
    else:
        axis = args.basis or 'z'
        basis = OrthonormalBasis.pauli_eigenbasis(axis)
        payload['basis'] = axis
        for tag in measures:
            payload[tag] = imag_measure(tag, rho, basis)
    _emit(state_io.json_text(payload), args)
    return 0


def _certified_exit(results):
    if all(r.diagnostics.certified for r in results):
        return 0
    print(get_text('not_certified'), file=sys.stderr)
    return OptimizerError.exit_code


def cmd_naqi(args, settings, pool):
    label, rho = _two_qubit_state(args)
    result = witness(rho, args.measure, config=optimizer_config(args, settings),
                     verdict_margin=_verdict_margin(args, settings), pool=pool)
    payload = dict(result.to_dict(), state=label)
    _emit(state_io.json_text(payload), args)
    return _certified_exit([result])


def _scan_grid(args):
    if args.values:
        return list(args.values)
    if args.range:
        start, stop, count = args.range
        if count < 2 or count != int(count):
            raise QimagError(f'--range 的点数必须是 >= 2 的整数, 实际 {count}', field='range')
        return np.linspace(start, stop, int(count)).tolist()
    return np.linspace(0.0, 1.0, 11).tolist()


def cmd_scan(args, settings, pool):
    records = scan_family(family_template(args.family), _scan_grid(args), args.measure,
                          config=optimizer_config(args, settings), pool=pool,
                          verdict_margin=_verdict_margin(args, settings))
    if args.format == 'csv':
        text = state_io.scan_csv(records, settings['csv_significant_digits'])
    else:
        text = state_io.scan_json(records)
    _emit(text, args)
    return _certified_exit([r.result for r in records])


def cmd_threshold(args, settings, pool):
    value = find_naqi_threshold(family_template(args.family), args.measure, bracket=tuple(args.bracket),
                                config=optimizer_config(args, settings), tol=args.tol, pool=pool)
    payload = {'family': args.family, 'measure': args.measure, 'threshold': value, 'tol': args.tol}
    _emit(state_io.json_text(payload), args)
    return 0


def cmd_exclusion(args, settings, pool):
    if args.variant == 'alpha-beta':
        grid = alpha_beta_grid(args.n_alpha, args.n_beta)
    else:
        lo, hi = args.theta_range if args.theta_range else (0.0, 2 * np.pi)
        if args.theta_range:
            lo, hi = _angle(lo, args.degrees), _angle(hi, args.degrees)
        grid = theta_grid(args.n_theta, lo, hi)
    records = exclusion_scan(grid, args.measure, config=optimizer_config(args, settings), pool=pool,
                             reverse_roles=args.reverse_roles,
                             verdict_margin=_verdict_margin(args, settings))
    if args.format == 'csv':
        text = state_io.exclusion_csv(records, settings['csv_significant_digits'])
    else:
        text = state_io.exclusion_json(records)
    _emit(text, args)
    return _certified_exit([x for r in records for x in r.results])


def _selftest_checks(config, margin):
    """生成 (名称, 是否通过, 说明)"""
    l1 = bound_constant('l1')
    yield 'bound_l1', abs(l1.value - L1_BOUND) < 1e-12, f'I_l1 = {l1.value:.12f}'
    try:
        r = bound_constant('r')
        yield ('bound_r', abs(r.value - REFERENCE_RELATIVE_ENTROPY_BOUND) < 5e-4,
               f'I_r = {r.value:.9f} (重新计算)')
    except QimagError as e:
        yield 'bound_r', False, str(e)

    for p in (0.2, 0.6, 1.0):
        result = witness(Werner(p).build(), 'l1', config=config, verdict_margin=margin)
        yield f'werner_l1(p={p})', abs(result.value - 3 * p) < SELFTEST_TOL, f'N = {result.value:.12f}'

    for p in (0.1, 0.2, 0.3):
        f_p = witness(BellMixture(p).build(), 'l1', config=config, verdict_margin=margin).witness
        f_q = witness(BellMixture(1 - p).build(), 'l1', config=config, verdict_margin=margin).witness
        yield f'bell_symmetry(p={p})', abs(f_p - f_q) < SELFTEST_TOL, f'F(p) = {f_p:.12f}, F(1-p) = {f_q:.12f}'

    for name, state in (('werner_verdict(p=0.7)', Werner(0.7)), ('bell_verdict(p=0.5)', BellMixture(0.5))):
        result = witness(state.build(), 'l1', config=config, verdict_margin=margin)
        yield name, not result.verdict, f'witness = {result.witness:.3e}, verdict = {result.verdict}'


def cmd_selftest(args, settings):
    config = optimizer_config(args, settings)
    margin = _verdict_margin(args, settings)
    if args.debug_verdict_margin is not None:
        margin = args.debug_verdict_margin
        logger.warning(f'自检使用注入的判定余量 {margin}')
    passed = total = 0
    failed = []
    for name, ok, detail in _selftest_checks(config, margin):
        total += 1
        passed += ok
        if not ok:
            failed.append(name)
        status = get_text('selftest_pass') if ok else get_text('selftest_fail')
        print(f'[{status}] {name}: {detail}')
    print(get_text('selftest_summary').format(passed=passed, total=total))
    if failed:
        print(f'{get_text("selftest_fail")}: {", ".join(failed)}', file=sys.stderr)
        logger.error(f'自检失败: {failed}')
        return 1
    return 0


def dispatch(args, settings):
    pooled = {'naqi': cmd_naqi, 'scan': cmd_scan, 'threshold': cmd_threshold, 'exclusion': cmd_exclusion}
    if args.command in pooled:
        workers = resolve_worker_count(args.workers, settings)
        with WorkerPool(workers) as pool:
            return pooled[args.command](args, settings, pool)
    handlers = {'bound': cmd_bound, 'measure': cmd_measure, 'selftest': cmd_selftest,
                'settings': cmd_settings}
    return handlers[args.command](args, settings)


def parse_and_dispatch(argv=None):
    """解析命令行并执行，返回退出码"""
    argv = list(sys.argv[1:] if argv is None else argv)
    known = _pre_parse(argv)
    settings = load_settings(known.settings)
    set_language(known.lang or settings.get('language', 'zh'))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    init_logging(args.log_file or settings['log_path'],
                 level=logging.DEBUG if args.verbose else logging.INFO,
                 console=args.verbose, command=' '.join(argv))
    try:
        return dispatch(args, settings)
    except OptimizerError as e:
        logger.error(f'{get_text("optimizer_error")}: {e} (location={e.location})')
        print(f'{get_text("optimizer_error")}: {e}', file=sys.stderr)
        return e.exit_code
    except QimagError as e:
        logger.error(f'{get_text("input_error")}: {e} ({get_text("field")}: {e.field})')
        field = f' [{get_text("field")}: {e.field}]' if e.field else ''
        print(f'{get_text("input_error")}{field}: {e}', file=sys.stderr)
        return e.exit_code


def main(argv=None):
    return parse_and_dispatch(argv)
