/** Currency formatting for payoffs shown to participants. */

export function formatCash(amount: number): string {
  return `$${amount.toFixed(2)}`;
}
