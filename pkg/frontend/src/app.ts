/** Controller: turns user actions into protocol envelopes and folds the
 * responses back into the view state. Every verdict shown to the user is
 * a server response; nothing is recomputed locally.
 */

import { RpcClient } from "./client.js";
import { applyResponse, initialState, type ViewState } from "./state.js";
import type { RequestEnvelope, ResponsePayload } from "./types.js";

export type Listener = (state: ViewState) => void;

export class App {
  state: ViewState = initialState();

  constructor(
    private readonly client: RpcClient,
    private readonly listener: Listener = () => {},
  ) {}

  private fold(response: ResponsePayload, request?: RequestEnvelope): ResponsePayload {
    this.state = applyResponse(this.state, response, request);
    this.listener(this.state);
    return response;
  }

  private async send(envelope: RequestEnvelope): Promise<ResponsePayload> {
    try {
      return this.fold(await this.client.rpc(envelope), envelope);
    } catch (err) {
      this.state = { ...this.state, banner: `network: ${String(err)}` };
      this.listener(this.state);
      throw err;
    }
  }

  /** Load a product line from the text of a features payload file. */
  async loadFromText(text: string): Promise<ResponsePayload | null> {
    let payload: unknown;
    try {
      payload = JSON.parse(text);
    } catch (err) {
      this.state = { ...this.state, banner: `could not parse file: ${String(err)}` };
      this.listener(this.state);
      return null;
    }
    return this.send(payload as RequestEnvelope);
  }

  /** Pull the model currently loaded on the server, if any. */
  async refreshModel(): Promise<ResponsePayload> {
    const response = await this.client.getModel();
    return this.fold(response);
  }

  toggle(feature: string): Promise<ResponsePayload> {
    return this.send({ method: "activate", feature });
  }

  editAttribute(feature: string | null, attribute: string, value: string): Promise<ResponsePayload> {
    return this.send({ method: "updateAttribute", feature, attribute, value });
  }

  validate(): Promise<ResponsePayload> {
    return this.send({ method: "validate" });
  }

  /** Clicking a suggestion chip issues exactly one toggle. */
  applySuggestion(index: number): Promise<ResponsePayload> {
    const suggestion = this.state.suggestions[index];
    if (!suggestion) {
      return Promise.reject(new Error(`no suggestion #${index}`));
    }
    return this.send({ method: "activate", feature: suggestion.feature });
  }

  commit(): Promise<ResponsePayload> {
    return this.send({ method: "commit" });
  }
}
