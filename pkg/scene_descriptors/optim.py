# -*- coding: utf-8 -*-
import numpy as np


class Adam(object):
    """
    Adaptive moment estimation over a list of parameter Tensors. Reads ``parameter.grad`` and updates
      ``parameter.data`` in place; parameters without a gradient are skipped.
    """

    def __init__(self, parameters, lr=0.005, beta1=0.9, beta2=0.999, epsilon=1e-8, weight_decay=0.0):
        self.parameters = list(parameters)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.weight_decay = weight_decay

        self.m = [np.zeros_like(parameter.data) for parameter in self.parameters]
        self.v = [np.zeros_like(parameter.data) for parameter in self.parameters]
        self.t = 0

    def step(self):
        self.t += 1

        # Bias corrections are shared by every parameter of this step
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        step_size = self.lr / bc1

        for parameter, m, v in zip(self.parameters, self.m, self.v):
            grad = parameter.grad
            if grad is None:
                continue
            if self.weight_decay:
                grad = grad + self.weight_decay * parameter.data

            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * (grad * grad)

            denom = np.sqrt(v * (1.0 / bc2)) + self.epsilon
            parameter.data -= (step_size * m / denom).astype(parameter.data.dtype)

    def zero_grad(self):
        for parameter in self.parameters:
            parameter.grad = None
