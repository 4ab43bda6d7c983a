import hashlib

import pytest

from certchain.errors import ClockRegression, MalformedPayload, SignerUnknown
from certchain.keys import Keyring, SigningKey
from certchain.ledger import (
    ZERO_DIGEST,
    Block,
    BlockHeader,
    ChainId,
    ChainState,
    FailureKind,
    append_block,
    compute_block_hash,
    digest_from_hex,
    digest_to_hex,
    genesis_payload,
    get_block,
    make_genesis,
    sha256,
    verify_chain,
)

from .oracles import reference_block_hash, reference_header_bytes, scan_for_block

# FIPS 180-4 short-message vectors.
SHA256_VECTORS = [
    (b"", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"),
    (b"abc", "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"),
    (
        b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1",
    ),
]

# Frozen golden values, computed once with the hashlib reference oracle over
# the hand-built canonical bytes (see test_genesis_golden_matches_oracle).
GENESIS_HASH = {
    ChainId.CERT: "8ca2befc9e9fbaed1c90b72afadce667d979b543b78275e3dc445a00f139251e",
    ChainId.CORR: "b6bf84c699bad7c89aa4d0a0be5fbe5461546f58ab00905148926dd98983b60b",
}


@pytest.mark.parametrize("message,expected", SHA256_VECTORS)
def test_sha256_vectors(message, expected):
    assert sha256(message).hex() == expected


def test_sha256_determinism():
    data = b"some payload"
    assert sha256(data) == sha256(data)
    assert len(sha256(data)) == 32


def test_digest_hex_round_trip():
    digest = sha256(b"x")
    assert digest_from_hex(digest_to_hex(digest)) == digest
    assert digest_to_hex(digest) == digest_to_hex(digest).lower()
    with pytest.raises(MalformedPayload):
        digest_from_hex("ab" * 31)
    with pytest.raises(MalformedPayload):
        digest_from_hex("zz" * 32)


class TestComputeBlockHash:
    def test_genesis_golden_matches_oracle(self):
        for chain_id in ChainId:
            payload = genesis_payload(chain_id)
            header = BlockHeader(
                chain_id=chain_id,
                height=0,
                timestamp=0,
                prev_hash=ZERO_DIGEST,
                payload_hash=sha256(payload),
            )
            # independent oracle: literal canonical header text through hashlib
            literal = (
                '{"chain_id":"%s","height":0,"payload_hash":"%s","prev_hash":"%s","timestamp":0}'
                % (chain_id.value, sha256(payload).hex(), "0" * 64)
            ).encode("ascii")
            oracle = hashlib.sha256(literal).hexdigest()
            assert compute_block_hash(header).hex() == oracle
            assert oracle == GENESIS_HASH[chain_id]

    def test_timestamp_sensitivity(self):
        base = BlockHeader(ChainId.CERT, 1, 100, ZERO_DIGEST, sha256(b"p"))
        other = BlockHeader(ChainId.CERT, 1, 101, ZERO_DIGEST, sha256(b"p"))
        assert compute_block_hash(base) != compute_block_hash(other)

    def test_determinism(self):
        header = BlockHeader(ChainId.CERT, 3, 99, sha256(b"a"), sha256(b"b"))
        twin = BlockHeader(ChainId.CERT, 3, 99, sha256(b"a"), sha256(b"b"))
        assert compute_block_hash(header) == compute_block_hash(twin)


@pytest.fixture
def keyring(bootstrap_key):
    ring = Keyring(bootstrap_key.key_id)
    ring.add(bootstrap_key.credential())
    return ring


@pytest.fixture
def chain(bootstrap_key):
    return ChainState.genesis(ChainId.CERT, bootstrap_key)


def grow(state, keyring, signer, payloads, start_ts=10):
    blocks = []
    for i, payload in enumerate(payloads):
        block, state = append_block(state, payload, signer, start_ts + i, keyring)
        blocks.append(block)
    return blocks, state


class TestAppendBlock:
    def test_first_append_links_to_genesis(self, chain, keyring, bootstrap_key):
        block, state = append_block(chain, b'{"n":1}', bootstrap_key, 5, keyring)
        assert block.header.height == 1
        assert block.header.prev_hash == chain.tip_hash
        assert digest_to_hex(chain.tip_hash) == GENESIS_HASH[ChainId.CERT]
        assert state.height == 1
        assert state.tip is block

    def test_unregistered_signer_rejected(self, chain, keyring):
        rogue = SigningKey.from_seed("rogue", b"\x07" * 32)
        with pytest.raises(SignerUnknown):
            append_block(chain, b"{}", rogue, 5, keyring)

    def test_registered_key_id_with_wrong_key_rejected(self, chain, keyring):
        imposter = SigningKey.from_seed("bootstrap", b"\x07" * 32)
        with pytest.raises(SignerUnknown):
            append_block(chain, b"{}", imposter, 5, keyring)

    def test_clock_regression_rejected(self, chain, keyring, bootstrap_key):
        _, state = append_block(chain, b"{}", bootstrap_key, 50, keyring)
        with pytest.raises(ClockRegression):
            append_block(state, b"{}", bootstrap_key, 49, keyring)
        # equal timestamps are allowed
        block, _ = append_block(state, b"{}", bootstrap_key, 50, keyring)
        assert block.header.timestamp == 50

    def test_three_appends_match_reference_oracle(self, chain, keyring, bootstrap_key):
        payloads = [b'{"n":1}', b'{"n":2}', b'{"n":3}']
        blocks, state = grow(chain, keyring, bootstrap_key, payloads)
        assert [b.header.height for b in blocks] == [1, 2, 3]
        all_blocks = list(state.blocks)
        for pos in range(1, len(all_blocks)):
            expected_prev = reference_block_hash(all_blocks[pos - 1])
            assert all_blocks[pos].header.prev_hash == expected_prev
            assert all_blocks[pos].block_hash == reference_block_hash(all_blocks[pos])
            assert (
                all_blocks[pos].header.payload_hash
                == hashlib.sha256(all_blocks[pos].payload).digest()
            )

    def test_append_is_deterministic(self, chain, keyring, bootstrap_key):
        one, _ = append_block(chain, b'{"n":1}', bootstrap_key, 7, keyring)
        two, _ = append_block(chain, b'{"n":1}', bootstrap_key, 7, keyring)
        assert one == two
        assert one.signature == two.signature

    def test_duplicate_payloads_get_distinct_hashes(self, chain, keyring, bootstrap_key):
        blocks, _ = grow(chain, keyring, bootstrap_key, [b'{"same":1}', b'{"same":1}'])
        assert blocks[0].payload == blocks[1].payload
        assert blocks[0].block_hash != blocks[1].block_hash


class TestGetBlock:
    def test_tip_and_absent(self, chain, keyring, bootstrap_key):
        _, state = grow(chain, keyring, bootstrap_key, [b'{"n":%d}' % i for i in range(5)])
        assert get_block(state, state.tip_hash) is state.tip
        assert get_block(state, b"\x42" * 32) is None

    def test_matches_linear_scan_on_20_block_chain(self, chain, keyring, bootstrap_key):
        _, state = grow(chain, keyring, bootstrap_key, [b'{"n":%d}' % i for i in range(20)])
        for k, block in enumerate(state.blocks):
            found = get_block(state, block.block_hash)
            assert found is block
            assert found.header.height == k
            assert scan_for_block(state.blocks, block.block_hash) is block


class TestVerifyChain:
    def test_fresh_chain_ok(self, chain, keyring, bootstrap_key):
        _, state = grow(chain, keyring, bootstrap_key, [b'{"n":%d}' % i for i in range(10)])
        assert verify_chain(state.blocks, keyring).ok

    def test_payload_flip_reported_at_height(self, chain, keyring, bootstrap_key):
        _, state = grow(chain, keyring, bootstrap_key, [b'{"n":%d}' % i for i in range(9)])
        blocks = list(state.blocks)
        target = blocks[4]
        tampered = bytearray(target.payload)
        tampered[0] ^= 0x01
        blocks[4] = Block(target.header, bytes(tampered), target.signer_key_id, target.signature)
        report = verify_chain(blocks, keyring)
        assert (report.ok, report.first_failure, report.kind) == (
            False,
            4,
            FailureKind.PAYLOAD_MISMATCH,
        )

    def test_prev_hash_flip_is_broken_link(self, chain, keyring, bootstrap_key):
        _, state = grow(chain, keyring, bootstrap_key, [b'{"n":%d}' % i for i in range(9)])
        blocks = list(state.blocks)
        target = blocks[4]
        bad_prev = bytearray(target.header.prev_hash)
        bad_prev[0] ^= 0xFF
        header = BlockHeader(
            target.header.chain_id,
            target.header.height,
            target.header.timestamp,
            bytes(bad_prev),
            target.header.payload_hash,
        )
        blocks[4] = Block(header, target.payload, target.signer_key_id, target.signature)
        report = verify_chain(blocks, keyring)
        assert (report.ok, report.first_failure, report.kind) == (
            False,
            4,
            FailureKind.BROKEN_LINK,
        )

    def test_unknown_signer_is_bad_signature(self, chain, keyring, bootstrap_key):
        _, state = grow(chain, keyring, bootstrap_key, [b"{}"])
        blocks = list(state.blocks)
        target = blocks[1]
        blocks[1] = Block(target.header, target.payload, "ghost", target.signature)
        report = verify_chain(blocks, keyring)
        assert (report.ok, report.first_failure, report.kind) == (
            False,
            1,
            FailureKind.BAD_SIGNATURE,
        )

    def test_wrong_genesis_chain_rejected(self, keyring, bootstrap_key):
        corr = ChainState.genesis(ChainId.CORR, bootstrap_key)
        report = verify_chain(corr.blocks, keyring, chain_id=ChainId.CERT)
        assert (report.ok, report.kind) == (False, FailureKind.BAD_GENESIS)

    def test_tampered_genesis_is_bad_genesis(self, chain, keyring):
        genesis = chain.blocks[0]
        header = BlockHeader(
            genesis.header.chain_id,
            genesis.header.height,
            genesis.header.timestamp + 1,
            genesis.header.prev_hash,
            genesis.header.payload_hash,
        )
        report = verify_chain(
            [Block(header, genesis.payload, genesis.signer_key_id, genesis.signature)],
            keyring,
        )
        assert (report.ok, report.first_failure, report.kind) == (
            False,
            0,
            FailureKind.BAD_GENESIS,
        )


def _variants(block):
    """Every single-bit flip of every stored field of a block."""
    header = block.header
    for i in range(len(block.payload) * 8):
        mutated = bytearray(block.payload)
        mutated[i // 8] ^= 1 << (i % 8)
        yield Block(header, bytes(mutated), block.signer_key_id, block.signature)
    for i in range(len(block.signature) * 8):
        mutated = bytearray(block.signature)
        mutated[i // 8] ^= 1 << (i % 8)
        yield Block(header, block.payload, block.signer_key_id, bytes(mutated))
    for field in ("prev_hash", "payload_hash"):
        original = getattr(header, field)
        for i in range(len(original) * 8):
            mutated = bytearray(original)
            mutated[i // 8] ^= 1 << (i % 8)
            changed = {field: bytes(mutated)}
            yield Block(
                BlockHeader(
                    header.chain_id,
                    header.height,
                    header.timestamp,
                    changed.get("prev_hash", header.prev_hash),
                    changed.get("payload_hash", header.payload_hash),
                ),
                block.payload,
                block.signer_key_id,
                block.signature,
            )
    for field in ("height", "timestamp"):
        for bit in range(16):
            value = getattr(header, field) ^ (1 << bit)
            changed = {field: value}
            yield Block(
                BlockHeader(
                    header.chain_id,
                    changed.get("height", header.height),
                    changed.get("timestamp", header.timestamp),
                    header.prev_hash,
                    header.payload_hash,
                ),
                block.payload,
                block.signer_key_id,
                block.signature,
            )
    other_chain = ChainId.CORR if header.chain_id is ChainId.CERT else ChainId.CERT
    yield Block(
        BlockHeader(other_chain, header.height, header.timestamp, header.prev_hash,
                    header.payload_hash),
        block.payload,
        block.signer_key_id,
        block.signature,
    )
    yield Block(header, block.payload, block.signer_key_id + "x", block.signature)


def test_every_single_bit_flip_is_detected(chain, keyring, bootstrap_key):
    """Tamper evidence, exhaustively on a 3-block chain."""
    _, state = grow(chain, keyring, bootstrap_key, [b'{"n":0}', b'{"n":1}', b'{"n":2}'])
    baseline = list(state.blocks)
    assert verify_chain(baseline, keyring).ok
    checked = 0
    for pos in range(len(baseline)):
        for variant in _variants(baseline[pos]):
            blocks = list(baseline)
            blocks[pos] = variant
            assert not verify_chain(blocks, keyring).ok, (
                f"undetected mutation at height {pos}"
            )
            checked += 1
    assert checked > 2000


def test_deactivated_keys_still_verify_history(chain, bootstrap_key):
    ring = Keyring(bootstrap_key.key_id)
    ring.add(bootstrap_key.credential())
    _, state = grow(chain, ring, bootstrap_key, [b"{}"])
    ring.deactivate(bootstrap_key.key_id)
    assert verify_chain(state.blocks, ring).ok


def test_reference_header_bytes_agree(chain):
    # the oracle's hand-built header text must equal the library's canonical form
    from certchain.canonical import canonical_json

    genesis = chain.blocks[0]
    assert reference_header_bytes(genesis.header) == canonical_json(genesis.header.to_dict())
