/** Tiny RPC client: one envelope per POST, strictly one request in flight.
 * Requests issued while another is pending are queued in order.
 */

import type { RequestEnvelope, ResponsePayload } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class RpcClient {
  private chain: Promise<unknown> = Promise.resolve();
  private pendingCount = 0;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  get pending(): number {
    return this.pendingCount;
  }

  /** Queue an envelope; resolves with the decoded response envelope. */
  rpc(envelope: RequestEnvelope): Promise<ResponsePayload> {
    this.pendingCount += 1;
    const task = this.chain
      .then(() => this.post(envelope))
      .finally(() => {
        this.pendingCount -= 1;
      });
    this.chain = task.then(
      () => undefined,
      () => undefined,
    );
    return task;
  }

  /** Fetch the current feature model without mutating anything. */
  getModel(): Promise<ResponsePayload> {
    this.pendingCount += 1;
    const task = this.chain
      .then(async () => {
        const response = await this.fetchImpl(`${this.baseUrl}/model`);
        return (await response.json()) as ResponsePayload;
      })
      .finally(() => {
        this.pendingCount -= 1;
      });
    this.chain = task.then(
      () => undefined,
      () => undefined,
    );
    return task;
  }

  private async post(envelope: RequestEnvelope): Promise<ResponsePayload> {
    const response = await this.fetchImpl(`${this.baseUrl}/rpc`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(envelope),
    });
    return (await response.json()) as ResponsePayload;
  }
}
