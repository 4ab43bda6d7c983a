// Typed client for the registry service. All truth comes from the API; this
// module only moves JSON and attaches request signatures.

import { Session, signRequest } from "./signing";
import {
  CertificateRecord,
  CorrectionResponse,
  IssueResponse,
  VerificationResult,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public field?: string,
    public latestHash?: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function throwApiError(response: Response): Promise<never> {
  let code = "unknown";
  let message = `request failed with status ${response.status}`;
  let field: string | undefined;
  let latestHash: string | undefined;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
    field = body.field;
    latestHash = body.latest_hash;
  } catch {
    // non-JSON error body; keep the defaults
  }
  throw new ApiError(response.status, code, message, field, latestHash);
}

export class ApiClient {
  constructor(
    public baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
    private clock: () => number = () => Math.floor(Date.now() / 1000),
  ) {}

  async verify(query: string): Promise<VerificationResult> {
    const response = await this.fetchFn(`${this.baseUrl}/v1/verify/${query}`);
    if (!response.ok) await throwApiError(response);
    return (await response.json()) as VerificationResult;
  }

  async chainsVerify(): Promise<{ cert: { ok: boolean }; corr: { ok: boolean } }> {
    const response = await this.fetchFn(`${this.baseUrl}/v1/chains/verify`);
    if (!response.ok) await throwApiError(response);
    return await response.json();
  }

  private async signedPost(
    session: Session,
    path: string,
    payload: unknown,
  ): Promise<Response> {
    const body = JSON.stringify(payload);
    const timestamp = this.clock();
    const signature = await signRequest(session, "POST", path, timestamp, body);
    return this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      body,
      headers: {
        "Content-Type": "application/json",
        "X-Key-Id": session.keyId,
        "X-Timestamp": String(timestamp),
        "X-Signature": signature,
      },
    });
  }

  async issue(session: Session, record: CertificateRecord): Promise<IssueResponse> {
    const response = await this.signedPost(session, "/v1/certificates", record);
    if (!response.ok) await throwApiError(response);
    return (await response.json()) as IssueResponse;
  }

  async correct(
    session: Session,
    oldHash: string,
    record: CertificateRecord,
    reason: string,
  ): Promise<CorrectionResponse> {
    const response = await this.signedPost(session, "/v1/corrections", {
      old_certificate_hash: oldHash,
      certificate: record,
      reason,
    });
    if (!response.ok) await throwApiError(response);
    return (await response.json()) as CorrectionResponse;
  }
}
