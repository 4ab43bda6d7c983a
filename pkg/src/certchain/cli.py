"""Operator CLI covering the full lifecycle without the web UI.

Exit codes are stable so shell pipelines can branch on outcomes:

    0  ok          4  validation      6  conflict
    2  usage/state 5  not found       7  integrity
    3  auth
"""

from __future__ import annotations

import functools
import json
import sys
import time
from pathlib import Path

import click

from . import errors
from .keys import AdminCredential, SigningKey, load_key_file, save_key_file
from .ledger import ChainId, digest_to_hex
from .qr import decode_payload, encode_payload
from .records import CertificateRecord, Status
from .registry import Registry
from .storage import BOOTSTRAP_KEY_FILE, LedgerStore

EXIT_STATE = 2
EXIT_AUTH = 3
EXIT_VALIDATION = 4
EXIT_NOT_FOUND = 5
EXIT_CONFLICT = 6
EXIT_INTEGRITY = 7

_FIELD_FLAGS = {
    "serial": "--serial",
    "student_name": "--student-name",
    "student_id": "--student-id",
    "degree_title": "--degree",
    "major": "--major",
    "grade": "--grade",
    "graduation_date": "--graduation-date",
    "institution_id": "--institution",
}


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handles_errors(func):
    """Map registry/storage errors onto the exit-code table."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except errors.InvalidRecord as exc:
            flag = _FIELD_FLAGS.get(exc.field)
            _fail(EXIT_VALIDATION, f"invalid or missing {flag or exc.field}")
        except (errors.MalformedPayload, errors.UnsupportedVersion) as exc:
            _fail(EXIT_VALIDATION, str(exc))
        except (errors.Unauthorized, errors.SignerUnknown, PermissionError) as exc:
            _fail(EXIT_AUTH, str(exc))
        except errors.UnknownCertificate as exc:
            _fail(EXIT_NOT_FOUND, str(exc))
        except (errors.AlreadyCorrected, errors.DuplicateKeyId) as exc:
            _fail(EXIT_CONFLICT, str(exc))
        except (errors.CorruptLedger, errors.BadGenesis, errors.InconsistentLedger) as exc:
            _fail(EXIT_INTEGRITY, str(exc))
        except (
            errors.AlreadyInitialized,
            errors.ClockRegression,
            errors.HeightGap,
            errors.IoFailure,
            FileNotFoundError,
        ) as exc:
            _fail(EXIT_STATE, str(exc))

    return wrapper


def data_dir_option(func):
    return click.option(
        "--data-dir",
        envvar="CERTCHAIN_DATA_DIR",
        default="certchain-data",
        show_default=True,
        type=click.Path(path_type=Path),
        help="Store directory (env: CERTCHAIN_DATA_DIR).",
    )(func)


def record_options(func):
    for field, flag in reversed(list(_FIELD_FLAGS.items())):
        func = click.option(flag, field, default="", help=f"Certificate {field}.")(func)
    func = click.option(
        "--extra",
        "extras",
        multiple=True,
        metavar="KEY=VALUE",
        help="Extra record field (repeatable).",
    )(func)
    return func


def _build_record(issued_at: int, extras: tuple[str, ...], **fields) -> CertificateRecord:
    extra_map = {}
    for item in extras:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise errors.InvalidRecord("extras", f"--extra needs KEY=VALUE, got {item!r}")
        extra_map[key] = value
    record = CertificateRecord(issued_at=issued_at, extras=extra_map, **fields)
    record.validate()
    return record


@click.group()
def main() -> None:
    """Tamper-evident academic certificate registry."""


@main.command()
@data_dir_option
@handles_errors
def init(data_dir: Path) -> None:
    """Create genesis blocks for both chains and the bootstrap keyring."""
    bootstrap = SigningKey.generate("bootstrap")
    store = LedgerStore.init(data_dir, bootstrap)
    store.close()
    save_key_file(data_dir / BOOTSTRAP_KEY_FILE, bootstrap)
    click.echo(f"initialized store in {data_dir}")
    click.echo(f"bootstrap key written to {data_dir / BOOTSTRAP_KEY_FILE}")


@main.command()
@click.option("--key-id", required=True, help="Identifier for the new key.")
@click.option(
    "--out", required=True, type=click.Path(path_type=Path), help="Key file destination."
)
@handles_errors
def keygen(key_id: str, out: Path) -> None:
    """Generate a signing key pair (the secret is only written to --out)."""
    save_key_file(out, SigningKey.generate(key_id))
    click.echo(f"key {key_id!r} written to {out}")


@main.group()
def admin() -> None:
    """Manage admin credentials (requires the bootstrap key)."""


def _super_key(data_dir: Path, super_key: Path | None) -> SigningKey:
    return load_key_file(super_key or data_dir / BOOTSTRAP_KEY_FILE)


@admin.command("add")
@data_dir_option
@click.option(
    "--key-file",
    type=click.Path(path_type=Path),
    required=True,
    help="Key file of the admin to register (public part is read).",
)
@click.option("--name", default="", help="Display name for the credential.")
@click.option(
    "--super-key",
    type=click.Path(path_type=Path),
    default=None,
    help="Bootstrap key file [default: <data-dir>/bootstrap.key].",
)
@handles_errors
def admin_add(data_dir: Path, key_file: Path, name: str, super_key: Path | None) -> None:
    """Register a new admin credential in the keyring."""
    new_key = load_key_file(key_file)
    registry = Registry.open(data_dir)
    try:
        registry.register_admin(
            AdminCredential(new_key.key_id, new_key.public_key, display_name=name),
            _super_key(data_dir, super_key),
        )
    finally:
        registry.close()
    click.echo(f"registered admin {new_key.key_id!r}")


@admin.command("deactivate")
@data_dir_option
@click.option("--key-id", required=True, help="Credential to deactivate.")
@click.option(
    "--super-key",
    type=click.Path(path_type=Path),
    default=None,
    help="Bootstrap key file [default: <data-dir>/bootstrap.key].",
)
@handles_errors
def admin_deactivate(data_dir: Path, key_id: str, super_key: Path | None) -> None:
    """Deactivate a credential; its historical blocks still verify."""
    registry = Registry.open(data_dir)
    try:
        registry.deactivate_admin(key_id, _super_key(data_dir, super_key))
    finally:
        registry.close()
    click.echo(f"deactivated admin {key_id!r}")


@main.command()
@data_dir_option
@click.option(
    "--key", "key_file", required=True, type=click.Path(path_type=Path),
    help="Signing key file of the issuing admin.",
)
@record_options
@click.option("--issued-at", type=int, default=None, help="Unix seconds [default: now].")
@click.option(
    "--qr-png", type=click.Path(path_type=Path), default=None,
    help="Also write the QR code as a PNG image.",
)
@handles_errors
def issue(
    data_dir: Path,
    key_file: Path,
    extras: tuple[str, ...],
    issued_at: int | None,
    qr_png: Path | None,
    **fields,
) -> None:
    """Issue a certificate; prints the QR payload and the block hash (last line)."""
    now = int(time.time()) if issued_at is None else issued_at
    record = _build_record(now, extras, **fields)
    issuer = load_key_file(key_file)
    registry = Registry.open(data_dir)
    try:
        certificate_hash = registry.issue_certificate(record, issuer, now)
    finally:
        registry.close()
    payload = encode_payload(certificate_hash)
    if qr_png is not None:
        from .qrimage import write_png

        write_png(payload, qr_png)
        click.echo(f"qr image: {qr_png}")
    click.echo(f"qr payload: {payload}")
    click.echo(digest_to_hex(certificate_hash))


@main.command()
@data_dir_option
@click.option(
    "--key", "key_file", required=True, type=click.Path(path_type=Path),
    help="Signing key file of the correcting admin.",
)
@click.option("--old-hash", required=True, help="Hash of the certificate to correct.")
@click.option("--reason", default="", help="Why the correction was made.")
@record_options
@click.option("--issued-at", type=int, default=None, help="Unix seconds [default: now].")
@handles_errors
def correct(
    data_dir: Path,
    key_file: Path,
    old_hash: str,
    reason: str,
    extras: tuple[str, ...],
    issued_at: int | None,
    **fields,
) -> None:
    """Correct a certificate: new CERT block plus a CORR reference block."""
    now = int(time.time()) if issued_at is None else issued_at
    record = _build_record(now, extras, **fields)
    issuer = load_key_file(key_file)
    old = decode_payload(old_hash).certificate_hash
    registry = Registry.open(data_dir)
    try:
        new_hash, corr_hash = registry.correct_certificate(old, record, issuer, reason, now)
    finally:
        registry.close()
    click.echo(f"new certificate hash: {digest_to_hex(new_hash)}")
    click.echo(f"correction block hash: {digest_to_hex(corr_hash)}")


@main.command()
@data_dir_option
@click.argument("query")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@handles_errors
def verify(data_dir: Path, query: str, as_json: bool) -> None:
    """Authenticate a certificate hash or QR payload."""
    payload = decode_payload(query)
    registry = Registry.open(data_dir, writable=False)
    result = registry.authenticate(payload.certificate_hash)
    if as_json:
        click.echo(json.dumps(result.to_dict(), indent=2))
    elif result.status is Status.NOT_FOUND:
        click.echo("Certificate does not exist")
    else:
        click.echo(f"status: {result.status.value}")
        if result.status is Status.SUPERSEDED:
            click.echo("trail (oldest first):")
            for entry in result.trail:
                click.echo(f"  {digest_to_hex(entry)}")
        record = result.certificate
        click.echo(f"serial: {record.serial}")
        click.echo(f"student: {record.student_name} ({record.student_id})")
        click.echo(f"degree: {record.degree_title}, {record.major}")
        click.echo(f"grade: {record.grade}")
        click.echo(f"graduated: {record.graduation_date}")
        click.echo(f"institution: {record.institution_id}")
    if result.status is Status.NOT_FOUND:
        sys.exit(EXIT_NOT_FOUND)


@main.command()
@data_dir_option
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@handles_errors
def audit(data_dir: Path, as_json: bool) -> None:
    """Verify both chain files end to end; exit 0 only if both are intact."""
    registry = Registry.open(data_dir, verify=False, writable=False)
    reports = registry.verify()
    pending = registry.pending_corrections()
    if as_json:
        click.echo(
            json.dumps(
                {
                    "cert": reports[ChainId.CERT].to_dict(),
                    "corr": reports[ChainId.CORR].to_dict(),
                    "pending_corrections": [p.to_dict() for p in pending],
                },
                indent=2,
            )
        )
    else:
        for chain_id in (ChainId.CERT, ChainId.CORR):
            report = reports[chain_id]
            if report.ok:
                height = registry.chain(chain_id).height
                click.echo(f"{chain_id.value}: ok (height {height})")
            else:
                click.echo(
                    f"{chain_id.value}: FAILED {report.kind.value} "
                    f"at height {report.first_failure}"
                )
        for item in pending:
            click.echo(
                "pending correction: certificate "
                f"{digest_to_hex(item.certificate_hash)} supersedes "
                f"{digest_to_hex(item.supersedes)} but no correction block exists"
            )
    if not all(r.ok for r in reports.values()):
        sys.exit(EXIT_INTEGRITY)


@main.command()
@data_dir_option
@click.option(
    "--addr",
    envvar="CERTCHAIN_ADDR",
    default="127.0.0.1:8431",
    show_default=True,
    help="listen address host:port (env: CERTCHAIN_ADDR).",
)
@click.option(
    "--writer-key",
    type=click.Path(path_type=Path),
    default=None,
    help="Key that signs blocks written via HTTP [default: <data-dir>/bootstrap.key].",
)
@click.option(
    "--keyring",
    "keyring_path",
    envvar="CERTCHAIN_KEYRING",
    type=click.Path(path_type=Path),
    default=None,
    help="Keyring path [default: <data-dir>/keyring.json] (env: CERTCHAIN_KEYRING).",
)
@click.option(
    "--clock-skew",
    envvar="CERTCHAIN_CLOCK_SKEW",
    type=int,
    default=300,
    show_default=True,
    help="Signed-request timestamp window in seconds (env: CERTCHAIN_CLOCK_SKEW).",
)
@click.option(
    "--cors-origin",
    "cors_origins",
    envvar="CERTCHAIN_CORS_ORIGIN",
    multiple=True,
    help="Allowed webapp origin (repeatable).",
)
@handles_errors
def serve(
    data_dir: Path,
    addr: str,
    writer_key: Path | None,
    keyring_path: Path | None,
    clock_skew: int,
    cors_origins: tuple[str, ...],
) -> None:
    """Run the HTTP service (tolerant open: tampering stays reportable)."""
    import uvicorn

    from .service import create_app

    key = load_key_file(writer_key or data_dir / BOOTSTRAP_KEY_FILE)
    registry = Registry.open(data_dir, verify=False, keyring_path=keyring_path)
    for chain_id, report in registry.verify().items():
        if not report.ok:
            click.echo(
                f"warning: {chain_id.value} chain fails verification "
                f"({report.kind.value} at height {report.first_failure})",
                err=True,
            )
    app = create_app(
        registry,
        writer_key=key,
        clock_skew=clock_skew,
        cors_origins=list(cors_origins) or None,
    )
    host, _, port = addr.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
